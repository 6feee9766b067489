#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the command surface: exit-code taxonomy, report
// emission, config/flag merging, and thread invariance of the output bytes.
// The binary path arrives via ORTHOCURV_BIN (set by ctest).

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

std::string bin() {
  const char* p = std::getenv("ORTHOCURV_BIN");
  REQUIRE_MESSAGE(p != nullptr, "ORTHOCURV_BIN must point at the CLI binary");
  return p;
}

RunResult run(const std::string& args) {
  const std::string cmd = bin() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing output file: " + path).c_str());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("help exits 0") {
  CHECK(run("--help").code == 0);
  CHECK(run("verify --help").code == 0);
}

TEST_CASE("catalog lists the built-in manifolds") {
  const auto r = run("catalog");
  CHECK(r.code == 0);
  for (const char* name : {"flat-c2", "cp2", "hp1", "s2-polar", "cp1xcp1"})
    CHECK(r.out.find(name) != std::string::npos);
}

TEST_CASE("curvature report on a flat entry") {
  const auto r = run("curvature --manifold flat-c2 --out cli-scratch/curv");
  CHECK(r.code == 0);
  CHECK(r.out.find("WROTE") != std::string::npos);
  const std::string doc = slurp("cli-scratch/curv/curvature_flat-c2.json");
  CHECK(doc.find("\"max_abs_riemann\"") != std::string::npos);
  CHECK(doc.find("\"content_hash\"") != std::string::npos);
  CHECK(doc.find("\"config\"") != std::string::npos);
  CHECK(slurp("cli-scratch/curv/curvature_flat-c2_riemann.csv").rfind("i,j,k,l,", 0) == 0);
}

TEST_CASE("verify limits passes on cp2") {
  const auto r = run("verify limits --manifold cp2 --seed 11 --out cli-scratch/lim");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  const std::string doc = slurp("cli-scratch/lim/verify_limits_cp2.json");
  CHECK(doc.find("\"verdict\": \"PASS\"") != std::string::npos);
  CHECK(doc.find("\"content_hash\"") != std::string::npos);
}

TEST_CASE("exit codes: config errors are 2") {
  CHECK(run("curvature --manifold not-a-manifold --out cli-scratch/x").code == 2);
  CHECK(run("curvature --manifold cp2 --point 0,0,0 --out cli-scratch/x").code == 2);
  CHECK(run("verify limits --manifold cp2 --point 0,0,0,0 --out cli-scratch/x").code == 2);
}

TEST_CASE("unknown config keys are rejected") {
  std::ofstream("cli-scratch-bad.ini") << "manifold = cp2\n[manifold]\nknid = kahler\n";
  const auto r = run("curvature --config cli-scratch-bad.ini --out cli-scratch/x");
  CHECK(r.code == 2);
  CHECK(r.out.find("manifold.knid") != std::string::npos);
}

TEST_CASE("flags override config files") {
  std::ofstream("cli-scratch-seed.ini") << "manifold = cp2\nseed = 3\n";
  const auto a =
      run("verify limits --config cli-scratch-seed.ini --out cli-scratch/ovr --seed 9");
  CHECK(a.code == 0);
  const std::string doc = slurp("cli-scratch/ovr/verify_limits_cp2.json");
  CHECK(doc.find("\"seed\": \"9\"") != std::string::npos);
  CHECK(doc.find("\"seed\": \"3\"") == std::string::npos);
}

TEST_CASE("report bytes are thread-count invariant") {
  std::ofstream("cli-scratch-cmp.ini") << "manifold = cp2\n"
                                          "seed = 7\n"
                                          "[comparison]\n"
                                          "r_min = 0.3\n"
                                          "r_max = 0.9\n"
                                          "r_points = 4\n"
                                          "directions = 3\n"
                                          "hyp_samples = 20\n"
                                          "riccati_cases = 2\n"
                                          "lemma_cases = 1\n";
  const auto a =
      run("verify comparison --config cli-scratch-cmp.ini --threads 1 --out cli-scratch/t1");
  REQUIRE_MESSAGE(a.code == 0, a.out.c_str());
  const auto b =
      run("verify comparison --config cli-scratch-cmp.ini --threads 8 --out cli-scratch/t8");
  REQUIRE(b.code == 0);
  CHECK(slurp("cli-scratch/t1/verify_comparison_cp2.json") ==
        slurp("cli-scratch/t8/verify_comparison_cp2.json"));
}

TEST_CASE("plotdata emits csv") {
  const auto r = run(
      "plotdata comparison --kind kahler --k 1 --n 2 --r-min 0.2 --r-max 1.0 --r-points 5"
      " --manifold cp2 --out cli-scratch/plot");
  CHECK(r.code == 0);
  const std::string csv = slurp("cli-scratch/plot/plotdata_comparison_cp2.csv");
  CHECK(csv.rfind("r,lhs,rhs,margin\n", 0) == 0);
}

TEST_CASE("simulate rho writes a report with boundary analysis") {
  const auto r = run(
      "simulate rho --k 1 --m 4 --kind kahler --rho0 0.5 --T 0.02 --dt 1e-3 --paths 32"
      " --seed 4 --out cli-scratch/rho");
  CHECK(r.code == 0);
  const std::string doc = slurp("cli-scratch/rho/simulate_rho.json");
  CHECK(doc.find("\"hits\": 0") != std::string::npos);
  CHECK(doc.find("\"boundary\"") != std::string::npos);
  CHECK(doc.find("\"ensemble_hash\"") != std::string::npos);
}
