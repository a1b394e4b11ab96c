#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <cmath>

// End-to-end exit-code and output-format matrix for the CLI binary.
// CLI_BIN is injected by the build; runs happen in a scratch directory.

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

std::string scratch_dir() {
  static std::string dir = [] {
    std::string d = "cli_scratch";
    const int rc = std::system(("rm -rf " + d + " && mkdir -p " + d).c_str());
    (void)rc;
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const std::string dir = scratch_dir();
  const std::string out = dir + "/stdout.txt";
  const std::string cmd = "cd " + dir + " && " + CLI_BIN + " " + args + " > " +
                          "stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.stdout_text = ss.str();
  return r;
}

std::string slurp(const std::string& rel) {
  std::ifstream in(scratch_dir() + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// JSON text with the timestamp line removed, for byte-identical comparison.
std::string strip_timestamp(const std::string& text) {
  std::stringstream in(text), out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("\"timestamp\"") == std::string::npos) out << line << '\n';
  return out.str();
}

}  // namespace

TEST_CASE("curve subcommand: success, outputs, determinism") {
  auto r = run_cli("curve --lambda 1 --r0 1 --out c1");
  CHECK(r.exit_code == 0);
  const std::string csv = slurp("c1.csv");
  CHECK(csv.rfind("s,x,y,theta,k,r,invariant", 0) == 0);
  const std::string json1 = slurp("c1.json");
  CHECK(json1.find("\"invariant_deviation\"") != std::string::npos);
  // deviation value in the summary stays below 1e-6
  {
    const auto pos = json1.find("\"invariant_deviation\": ");
    const double dev = std::stod(json1.substr(pos + 24));
    CHECK(dev < 1e-6);
    CHECK(dev >= 0.0);
  }
  CHECK(slurp("c1.gp").find("plot") != std::string::npos);

  // byte-identical reruns modulo the timestamp
  auto r2 = run_cli("curve --lambda 1 --r0 1 --out c1b");
  CHECK(r2.exit_code == 0);
  CHECK(strip_timestamp(json1) == strip_timestamp(slurp("c1b.json")));
  CHECK(csv == slurp("c1b.csv"));
}

TEST_CASE("curve subcommand: r0 = 0 summary and validation") {
  auto r = run_cli("curve --lambda 1 --r0 0 --out c0");
  CHECK(r.exit_code == 0);
  const std::string json = slurp("c0.json");
  CHECK(json.find("\"alpha\": 3.141592653589793") != std::string::npos);
  CHECK(json.find("\"total_curvature\": 0.0") != std::string::npos);

  CHECK(run_cli("curve --r0 1").exit_code == 2);          // missing --lambda
  CHECK(run_cli("curve --lambda -1 --r0 1").exit_code == 2);
  CHECK(run_cli("curve --lambda 1 --r0 -2").exit_code == 2);
}

TEST_CASE("family subcommand") {
  auto r = run_cli("family --lambda 1 --r0-list 0,0.5,1,2 --out fam");
  CHECK(r.exit_code == 0);
  std::stringstream ss(slurp("fam.csv"));
  std::string line;
  std::getline(ss, line);
  CHECK(line == "r0,alpha,total_curvature");
  int rows = 0;
  double prev_alpha = 1e300;
  while (std::getline(ss, line)) {
    ++rows;
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    const double alpha = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(alpha < prev_alpha);
    prev_alpha = alpha;
  }
  CHECK(rows == 4);

  CHECK(run_cli("family --lambda 1 --r0-list \"\"").exit_code == 2);
  CHECK(run_cli("family --lambda 1 --r0-list 1 --out fam1").exit_code == 0);
}

TEST_CASE("verify subcommand: structure checks and expander pipeline") {
  // named analytic chart with a structure check
  auto torus = run_cli("verify --chart torus --check ricci --out vtorus");
  CHECK(torus.exit_code == 0);
  CHECK(torus.stdout_text.find("ricci residual max") != std::string::npos);

  // expander pipeline on the product chart (coarse but within gate)
  auto prod = run_cli(
      "verify --chart product --lambda 1 --r0 1 --extra-dims 1 "
      "--grid-s 2001 --out vprod");
  CHECK(prod.exit_code == 0);
  const std::string json = slurp("vprod.json");
  CHECK(json.find("\"passed\": true") != std::string::npos);
  CHECK(json.find("\"hint\": \"consistent with product Gamma x R^1\"") !=
        std::string::npos);
  {
    const auto anchor = json.find("\"pinching\"");
    const auto lo = json.find("\"min\": ", anchor);
    const auto hi = json.find("\"max\": ", anchor);
    const double pmin = std::stod(json.substr(lo + 7));
    const double pmax = std::stod(json.substr(hi + 7));
    CHECK(pmax - pmin < 1e-8);
    CHECK(std::abs(pmax - 1.0) < 1e-8);
  }

  // gate refusal
  auto sphere = run_cli("verify --chart sphere --lambda 1 --out vsph");
  CHECK(sphere.exit_code == 4);
  CHECK(slurp("vsph.json").find("\"passed\": false") != std::string::npos);

  // a too-coarse grid leaves identity residuals above tolerance: exit 3
  auto coarse = run_cli(
      "verify --chart product --lambda 1 --r0 1 --grid-s 41 --out vcoarse");
  CHECK(coarse.exit_code == 3);

  // unknown chart name
  CHECK(run_cli("verify --chart klein").exit_code == 2);
}

TEST_CASE("verify consumes exported curve CSV") {
  CHECK(run_cli("curve --lambda 1 --r0 1 --step 2.5e-4 --out forcsv")
            .exit_code == 0);
  auto r = run_cli(
      "verify --chart product --lambda 1 --curve-csv forcsv.csv "
      "--grid-s 2001 --out vcsv");
  CHECK(r.exit_code == 0);
  CHECK(slurp("vcsv.json").find("\"passed\": true") != std::string::npos);
}

TEST_CASE("flow subcommand: validation, convergence, thresholds") {
  CHECK(run_cli("flow --alpha 3.2").exit_code == 2);
  CHECK(run_cli("flow --alpha 1.5708 --t-end -1").exit_code == 2);

  // the reference run: quarter-angle cone to t = 2
  auto ok = run_cli(
      "flow --alpha 1.5708 --lambda 1 --t-end 2 --n 400 --out fok");
  CHECK(ok.exit_code == 0);
  const std::string json = slurp("fok.json");
  CHECK(json.find("\"distances\"") != std::string::npos);
  {
    const auto pos = json.rfind("]", json.find("\"n_points\""));
    const auto start = json.find("\"distances\": [");
    std::stringstream nums(json.substr(start + 15, pos - start - 15));
    std::string cell;
    std::vector<double> d;
    while (std::getline(nums, cell, ',')) d.push_back(std::stod(cell));
    REQUIRE(d.size() == 3);
    CHECK(d[2] < 5e-2);
    CHECK(d[1] < d[0]);
    CHECK(d[2] < d[1]);
  }
  CHECK(slurp("fok_snapshots.csv").rfind("t,x,y", 0) == 0);

  // unreachable threshold: finished but not converged
  auto strict = run_cli(
      "flow --alpha 1.5708 --t-end 0.5 --n 100 --threshold 1e-9 --out fbad");
  CHECK(strict.exit_code == 5);
  // a short run still reports its distances (convergence is then easy
  // because the cone gauge already matches; see cone_orbit_time_offset)
  auto shortrun =
      run_cli("flow --alpha 1.0472 --t-end 0.01 --n 100 --out fshort");
  CHECK(shortrun.exit_code == 0);
  CHECK(slurp("fshort.json").find("\"distances\"") != std::string::npos);
}

TEST_CASE("thread flag and environment fallback do not change results") {
  auto r1 = run_cli("verify --chart torus --check ricci --threads 1 --out vt1");
  auto r2 = run_cli("verify --chart torus --check ricci --threads 3 --out vt3");
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(strip_timestamp(slurp("vt1.json")) == strip_timestamp(slurp("vt3.json")));

  const std::string env_run =
      "cd " + scratch_dir() + " && EXPANDER_LAB_THREADS=2 " + CLI_BIN +
      " verify --chart torus --check ricci --out vte > /dev/null 2>&1";
  CHECK(std::system(env_run.c_str()) == 0);
  CHECK(strip_timestamp(slurp("vte.json")) == strip_timestamp(slurp("vt1.json")));
}
