#ifndef MCF_IO_HPP
#define MCF_IO_HPP

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "mcf/types.hpp"

namespace mcf {

// 17 significant digits: enough to round-trip a double exactly. Always
// '.' as decimal separator, no grouping (snprintf with the "C" locale).
inline std::string format_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << body;
}

}  // namespace mcf

#endif  // MCF_IO_HPP
