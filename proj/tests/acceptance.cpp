#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "orthocurv/curvature.hpp"
#include "orthocurv/experiments.hpp"
#include "orthocurv/geodesic.hpp"
#include "orthocurv/lemmas.hpp"
#include "orthocurv/sde.hpp"

// Acceptance gate: one numbered criterion per line, [PASS]/[FAIL] verdicts,
// with the tolerance and time budget each criterion is held to. Usage:
//   acceptance <1..12|all> [path-to-orthocurv-cli]
// Criterion 12 drives the installed CLI and needs the binary path (argv or
// ORTHOCURV_BIN). Exit 0 iff every requested criterion passed.

namespace oc = orthocurv;
using oc::Vec;

namespace {

constexpr double kPi = 3.1415926535897932;

struct Check {
  bool ok = true;
  std::string detail;  // appended measurements / first failure note

  void expect(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      note(msg);
    }
  }
  void note(const std::string& msg) {
    if (!detail.empty()) detail += "; ";
    detail += msg;
  }
};

std::string eng(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

std::string g_bin;  // CLI path for criterion 12

// ---- 1: flat-space zeroing ----
// flat C^2 and H^2: Gamma, R, Ric, H resp. Q, Ric_perp all < 1e-10 at 100
// seeded points each.
void c1(Check& c) {
  double worst = 0.0;
  for (const char* name : {"flat-c2", "flat-h2"}) {
    const oc::ManifoldSpec spec = oc::catalog_entry(name);
    oc::Rng rng(11);
    for (int s = 0; s < 100; ++s) {
      const Vec p = oc::sample_point(spec, rng);
      const oc::Curvature cv = oc::curvature_at(spec, p.data());
      for (double v : cv.gamma) worst = std::max(worst, std::abs(v));
      for (double v : cv.riemann) worst = std::max(worst, std::abs(v));
      worst = std::max(worst, cv.ricci.cwiseAbs().maxCoeff());
      const Vec v = oc::sample_unit(spec, cv.g, rng);
      worst = std::max(worst, std::abs(oc::structure_sectional(spec, cv, v)));
      const oc::RicPerp rp = oc::orthogonal_ricci(spec, cv, v);
      worst = std::max(worst, std::abs(rp.via_decomposition));
      worst = std::max(worst, std::abs(rp.via_frame_sum));
    }
  }
  c.expect(worst < 1e-10, "flat curvature leak " + eng(worst) + " >= 1e-10");
  c.note("max |curvature| " + eng(worst));
}

// ---- 2: curvature identity suite ----
// Riemann symmetries + first Bianchi + J-invariance within 1e-8 relative on
// every catalog entry, 100 seeded points each.
void c2(Check& c) {
  double worst = 0.0;
  std::string where = "-";
  for (const std::string& name : oc::catalog_names()) {
    const oc::IdentityScan s = oc::riemann_identity_scan(oc::catalog_entry(name), 100, 23);
    const double m = std::max(s.sym, std::max(s.bianchi, s.j_invariance));
    if (m > worst) {
      worst = m;
      where = name;
    }
  }
  c.expect(worst < 1e-8, "identity residual " + eng(worst) + " on " + where);
  c.note("worst relative residual " + eng(worst) + " (" + where + ")");
}

// ---- 3: constant-curvature anchors ----
// cp2: H = 4 +- 1e-7 and Ric = 6g +- 1e-7; hp1: Q = 12 +- 1e-7 and
// Ric = 12g +- 1e-7; 100 (point, direction) samples each.
void c3(Check& c) {
  struct Row {
    const char* name;
    double sect, einstein;
  };
  for (const Row& row : {Row{"cp2", 4.0, 6.0}, Row{"hp1", 12.0, 12.0}}) {
    const oc::ManifoldSpec spec = oc::catalog_entry(row.name);
    oc::Rng rng(31);
    double dev_sect = 0.0, dev_ric = 0.0;
    for (int s = 0; s < 100; ++s) {
      const Vec p = oc::sample_point(spec, rng);
      const oc::Curvature cv = oc::curvature_at(spec, p.data());
      const Vec v = oc::sample_unit(spec, cv.g, rng);
      dev_sect = std::max(dev_sect, std::abs(oc::structure_sectional(spec, cv, v) - row.sect));
      dev_ric = std::max(dev_ric, (cv.ricci - row.einstein * cv.g).cwiseAbs().maxCoeff());
    }
    c.expect(dev_sect < 1e-7,
             std::string(row.name) + " sectional anchor off by " + eng(dev_sect));
    c.expect(dev_ric < 1e-7, std::string(row.name) + " Einstein anchor off by " + eng(dev_ric));
    c.note(std::string(row.name) + " dev " + eng(std::max(dev_sect, dev_ric)));
  }
}

// ---- 4: orthogonal-Ricci two-route agreement ----
// |decomposition route - frame-sum route| < 1e-7 on all catalog entries.
void c4(Check& c) {
  double worst = 0.0;
  std::string where = "-";
  for (const std::string& name : oc::catalog_names()) {
    const oc::ManifoldSpec spec = oc::catalog_entry(name);
    oc::Rng rng(47);
    for (int s = 0; s < 50; ++s) {
      const Vec p = oc::sample_point(spec, rng);
      const oc::Curvature cv = oc::curvature_at(spec, p.data());
      const Vec v = oc::sample_unit(spec, cv.g, rng);
      const oc::RicPerp rp = oc::orthogonal_ricci(spec, cv, v);
      const double d = std::abs(rp.via_decomposition - rp.via_frame_sum);
      if (d > worst) {
        worst = d;
        where = name;
      }
    }
  }
  c.expect(worst < 1e-7, "two-route gap " + eng(worst) + " on " + where);
  c.note("max route gap " + eng(worst) + " (" + where + ")");
}

// ---- 5: Bochner residuals ----
// flat C^2, 200 seeded gradient-normalized polynomials, pure jets: < 1e-8;
// cp2 with f = r at 50 off-cut-locus samples: < 1e-4.
void c5(Check& c) {
  const oc::BochnerOutcome flat = oc::bochner_outcome(oc::catalog_entry("flat-c2"), 200, 57);
  c.expect(flat.flat_mode, "flat-c2 did not take the polynomial pipeline");
  c.expect(flat.verdict == "PASS", "flat-c2 bochner verdict " + flat.verdict);
  c.expect(flat.max_residual < 1e-8, "flat residual " + eng(flat.max_residual));
  const oc::BochnerOutcome curved = oc::bochner_outcome(oc::catalog_entry("cp2"), 50, 57);
  c.expect(!curved.flat_mode, "cp2 did not take the radial pipeline");
  c.expect(curved.verdict == "PASS", "cp2 bochner verdict " + curved.verdict);
  c.expect(curved.max_residual < 1e-4, "radial residual " + eng(curved.max_residual));
  c.note("flat " + eng(flat.max_residual) + ", radial " + eng(curved.max_residual));
}

// ---- 6: small-r limit ----
// Richardson-extrapolated r * Lap_perp r on cp2 equals 2 +- 1e-3.
void c6(Check& c) {
  const oc::LimitOutcome lim = oc::small_r_limit(oc::catalog_entry("cp2"), 61);
  c.expect(lim.verdict == "PASS", "limit verdict " + lim.verdict);
  c.expect(std::abs(lim.extrapolated - 2.0) < 1e-3,
           "extrapolated " + eng(lim.extrapolated) + " != 2 +- 1e-3");
  c.note("limit " + eng(lim.extrapolated));
}

// ---- 7: comparison equality case + perturbation canary ----
// cp2, Z = 0, m = 4, k = 1 pinned: |rhs - L r| < 1e-4 on the 20-point grid
// over [0.1, 1.4]; the conformal canary shows margin > 0.01 at r = 0.6.
void c7(Check& c) {
  const oc::ManifoldSpec spec = oc::catalog_entry("cp2");
  oc::ComparisonModel model;
  model.kind = oc::StructureKind::Kahler;
  model.flavor = oc::Flavor::NonGradientMZ;
  model.k = 1.0;
  model.m = 4.0;
  model.n = 2;
  const Vec base = Vec::Zero(4);
  const oc::ComparisonSweep sw =
      oc::comparison_sweep(spec, model, base, oc::linspace(0.1, 1.4, 20), 8, nullptr, nullptr,
                           50, 71, /*use_measured_k=*/false);
  c.expect(sw.verdict == "PASS", "sweep verdict " + sw.verdict);
  c.expect(sw.dropped_beyond_barrier == 0, "grid points dropped at the barrier");
  c.expect(sw.r.size() == 20, "grid size " + std::to_string(sw.r.size()));
  double max_abs = 0.0, anchor_gap = 0.0;
  for (std::size_t i = 0; i < sw.r.size(); ++i) {
    max_abs = std::max(max_abs, std::abs(sw.margin[i]));
    const double closed = 2.0 / std::tan(sw.r[i]) + 2.0 / std::tan(2.0 * sw.r[i]);
    anchor_gap = std::max(anchor_gap, std::abs(sw.rhs[i] - closed));
  }
  c.expect(max_abs < 1e-4, "equality margin " + eng(max_abs) + " >= 1e-4");
  c.expect(anchor_gap < 1e-12, "rhs drifts from 2cot r + 2cot 2r by " + eng(anchor_gap));

  const oc::ManifoldSpec canary = oc::conformal_canary(spec);
  const oc::ComparisonSweep cs = oc::comparison_sweep(
      canary, model, Vec::Zero(4), oc::linspace(0.4, 0.8, 5), 8, nullptr, nullptr, 50, 71);
  double margin_mid = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < cs.r.size(); ++i)
    if (std::abs(cs.r[i] - 0.6) < 0.02) margin_mid = cs.margin[i];
  c.expect(std::isfinite(margin_mid) && margin_mid > 0.01,
           "canary margin at 0.6 = " + eng(margin_mid) + " (want > 0.01)");
  c.note("max |margin| " + eng(max_abs) + ", canary margin " + eng(margin_mid));
}

// ---- 8: Riccati comparison ----
// 10 seeded (C, alpha) cases keep slack >= -1e-6; the C = 0 blow-down radius
// equals pi +- 1e-3 (k = 1).
void c8(Check& c) {
  oc::ComparisonModel model;
  model.kind = oc::StructureKind::Kahler;
  model.flavor = oc::Flavor::GradientRiccati;
  model.k = 1.0;
  model.n = 2;
  const oc::RiccatiSweep rs = oc::riccati_sweep(model, 10, 83);
  c.expect(rs.verdict == "PASS", "riccati verdict " + rs.verdict);
  c.expect(rs.cases == 10, "case count " + std::to_string(rs.cases));
  c.expect(rs.min_slack >= -1e-6, "min slack " + eng(rs.min_slack));
  c.expect(std::abs(rs.blowdown_closed - kPi) < 1e-9,
           "closed blow-down " + eng(rs.blowdown_closed));
  c.expect(std::abs(rs.blowdown_ode - kPi) < 1e-3, "ODE blow-down " + eng(rs.blowdown_ode));
  c.note("min slack " + eng(rs.min_slack) + ", blow-down gap " +
         eng(std::abs(rs.blowdown_ode - kPi)));
}

// ---- 9: SDE non-hitting + boundary classification ----
// k = 1, m = 4, rho0 = 0.5, T = 10, 1e4 paths: hits = 0 at dt = 1e-4 and at
// dt = 5e-5; the right endpoint pi/2 is declared inaccessible.
void c9(Check& c) {
  oc::DiffusionConfig dc;
  dc.model.kind = oc::StructureKind::Kahler;
  dc.model.flavor = oc::Flavor::NonGradientMZ;
  dc.model.k = 1.0;
  dc.model.m = 4.0;
  dc.model.n = 2;
  dc.rho0 = 0.5;
  dc.T = 10.0;
  dc.dt = 1e-4;
  dc.paths = 10000;
  dc.seed = 42;
  const unsigned hc = std::thread::hardware_concurrency();
  dc.threads = hc == 0 ? 4 : static_cast<int>(hc);
  const oc::DiffusionEnsemble a = oc::simulate_rho(dc);
  c.expect(a.hits == 0, "hits at dt=1e-4: " + std::to_string(a.hits));
  c.expect(a.underflows == 0, "underflows at dt=1e-4: " + std::to_string(a.underflows));
  dc.dt = 5e-5;
  const oc::DiffusionEnsemble b = oc::simulate_rho(dc);
  c.expect(b.hits == 0, "hits at dt=5e-5: " + std::to_string(b.hits));
  const oc::BoundaryReport br = oc::boundary_classification(dc.model);
  c.expect(!br.right.accessible, "right endpoint classified accessible");
  c.expect(br.right.cls == "entrance" || br.right.cls == "natural",
           "right endpoint class " + br.right.cls);
  c.note("hits 0/0, max rho " + eng(std::max(a.max_rho, b.max_rho)) + ", right endpoint " +
         br.right.cls);
}

// ---- 10: diameter bounds ----
// cp2 estimate pi/2 +- 2% from 200 pairs; measured-k barrier bound holds with
// sharpness >= 0.98; gradient-flavor bound pi (C = 0, k = 1, n = 2) holds;
// flat C^2 with quadratic phi refuses (NOT-APPLICABLE).
void c10(Check& c) {
  const oc::ManifoldSpec cp2 = oc::catalog_entry("cp2");
  oc::ComparisonModel mz;
  mz.kind = oc::StructureKind::Kahler;
  mz.flavor = oc::Flavor::NonGradientMZ;
  mz.k = 1.0;
  mz.n = 2;
  const oc::DiameterOutcome dm = oc::diameter_outcome(cp2, mz, nullptr, nullptr, 200, 97);
  c.expect(dm.verdict == "PASS", "barrier-bound verdict " + dm.verdict);
  c.expect(dm.pairs == 200, "pair count " + std::to_string(dm.pairs));
  c.expect(std::abs(dm.estimate - kPi / 2.0) <= 0.02 * (kPi / 2.0),
           "estimate " + eng(dm.estimate) + " not pi/2 +- 2%");
  c.expect(dm.holds, "barrier bound violated");
  c.expect(std::abs(dm.bound - kPi / 2.0) < 1e-6, "barrier bound " + eng(dm.bound));
  c.expect(dm.sharpness >= 0.98, "sharpness " + eng(dm.sharpness) + " < 0.98");

  oc::ComparisonModel grad = mz;
  grad.flavor = oc::Flavor::GradientBoundedPhi;
  grad.C = 0.0;
  const oc::DiameterOutcome dg = oc::diameter_outcome(cp2, grad, nullptr, nullptr, 200, 97);
  c.expect(dg.verdict == "PASS", "gradient-bound verdict " + dg.verdict);
  c.expect(dg.holds, "gradient bound violated");
  c.expect(std::abs(dg.bound - kPi) < 1e-6, "gradient bound " + eng(dg.bound) + " != pi");

  const oc::ManifoldSpec flat = oc::catalog_entry("flat-c2");
  const oc::dsl::Expression quad = oc::dsl::Expression::parse("x1^2 + x2^2 + x3^2 + x4^2");
  const oc::DiameterOutcome dn = oc::diameter_outcome(flat, grad, &quad, nullptr, 50, 97);
  c.expect(dn.verdict == "NOT-APPLICABLE",
           "flat quadratic-phi case verdict " + dn.verdict + " (want NOT-APPLICABLE)");
  c.note("estimate " + eng(dm.estimate) + ", sharpness " + eng(dm.sharpness));
}

// ---- 11: integral lemmas ----
// Gradient lemma and Lie-derivative variant hold with nonnegative margin on
// 10 seeded (manifold, phi or V, geodesic, profile) cases each.
void c11(Check& c) {
  double min_grad = std::numeric_limits<double>::infinity();
  double min_lie = std::numeric_limits<double>::infinity();
  int cases = 0;
  for (const char* name : {"cp2", "cp3", "hp1", "cp1xcp1", "s2-polar"}) {
    const oc::LemmaSweep ls = oc::lemma_sweep(oc::catalog_entry(name), 2, 103);
    c.expect(ls.verdict == "PASS", std::string(name) + " lemma verdict " + ls.verdict);
    min_grad = std::min(min_grad, ls.min_margin_gradient);
    min_lie = std::min(min_lie, ls.min_margin_lie);
    cases += ls.cases;
  }
  c.expect(cases == 10, "case count " + std::to_string(cases));
  c.expect(min_grad >= 0.0, "gradient lemma margin " + eng(min_grad) + " < 0");
  c.expect(min_lie >= 0.0, "Lie lemma margin " + eng(min_lie) + " < 0");
  c.note("min margins " + eng(min_grad) + " / " + eng(min_lie));
}

// ---- 12: thread-count determinism ----
// The same config + seed through the CLI with --threads 1, 8, 3 produces
// byte-identical report payloads (verify comparison and simulate rho).
std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return in.good() || in.eof() ? ss.str() : std::string();
}

int run_cli(const std::string& args) {
  const std::string cmd = g_bin + " " + args + " >> acceptance-c12.log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void c12(Check& c) {
  if (g_bin.empty()) {
    c.expect(false, "CLI binary path not provided (argv[2] or ORTHOCURV_BIN)");
    return;
  }
  std::remove("acceptance-c12.log");
  std::ofstream("acceptance-c12.ini") << "manifold = cp2\n"
                                         "seed = 7\n"
                                         "[comparison]\n"
                                         "r_min = 0.2\n"
                                         "r_max = 1.2\n"
                                         "r_points = 6\n"
                                         "directions = 4\n"
                                         "hyp_samples = 40\n"
                                         "riccati_cases = 3\n"
                                         "lemma_cases = 2\n";
  std::vector<std::string> payloads;
  for (int threads : {1, 8, 3}) {
    const std::string out = "acceptance-c12-t" + std::to_string(threads);
    const int rc = run_cli("verify comparison --config acceptance-c12.ini --threads " +
                           std::to_string(threads) + " --out " + out);
    c.expect(rc == 0, "verify comparison --threads " + std::to_string(threads) + " exited " +
                          std::to_string(rc));
    payloads.push_back(read_file(out + "/verify_comparison_cp2.json"));
    c.expect(!payloads.back().empty(), "missing report for --threads " + std::to_string(threads));
  }
  c.expect(payloads[0] == payloads[1] && payloads[0] == payloads[2],
           "verify reports differ across --threads");

  payloads.clear();
  for (int threads : {1, 6}) {
    const std::string out = "acceptance-c12-rho-t" + std::to_string(threads);
    const int rc = run_cli(
        "simulate rho --k 1 --m 4 --kind kahler --rho0 0.5 --T 0.05 --dt 1e-3 --paths 200"
        " --seed 5 --threads " +
        std::to_string(threads) + " --out " + out);
    c.expect(rc == 0, "simulate rho --threads " + std::to_string(threads) + " exited " +
                          std::to_string(rc));
    payloads.push_back(read_file(out + "/simulate_rho.json"));
  }
  c.expect(!payloads[0].empty() && payloads[0] == payloads[1],
           "simulate reports differ across --threads");
  c.note("byte-identical across --threads {1,8,3} and {1,6}");
}

struct Criterion {
  int id;
  const char* label;
  double time_limit;  // seconds; 0 = no budget pinned
  void (*fn)(Check&);
};

const std::vector<Criterion> kCriteria = {
    {1, "flat-space zeroing (< 1e-10, 100 pts, < 5 s)", 5.0, c1},
    {2, "curvature identities on every entry (< 1e-8 rel, < 60 s)", 60.0, c2},
    {3, "constant-curvature anchors cp2 / hp1 (+- 1e-7)", 0.0, c3},
    {4, "orthogonal-Ricci two-route agreement (< 1e-7)", 0.0, c4},
    {5, "Bochner residuals flat/radial (< 1e-8 / < 1e-4, < 10 min)", 600.0, c5},
    {6, "small-r limit on cp2 (2 +- 1e-3)", 0.0, c6},
    {7, "comparison equality case + canary (< 1e-4 / > 0.01)", 0.0, c7},
    {8, "Riccati slack and blow-down (>= -1e-6, pi +- 1e-3)", 0.0, c8},
    {9, "SDE non-hitting + boundary class (hits = 0, < 5 min)", 300.0, c9},
    {10, "diameter bounds (pi/2 +- 2%, sharpness >= 0.98, NA case)", 0.0, c10},
    {11, "integral lemmas, 10 cases each (margin >= 0)", 0.0, c11},
    {12, "thread-count determinism (byte-identical reports)", 0.0, c12},
};

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  if (argc > 2) g_bin = argv[2];
  if (g_bin.empty())
    if (const char* env = std::getenv("ORTHOCURV_BIN")) g_bin = env;

  int selected = 0, failed = 0;
  for (const Criterion& cr : kCriteria) {
    if (which != "all" && which != std::to_string(cr.id)) continue;
    ++selected;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.time_limit > 0.0 && secs > cr.time_limit)
      c.expect(false, "over time budget " + eng(cr.time_limit) + " s");
    if (!c.ok) ++failed;
    std::printf("[%s] criterion %2d: %s — %s (%.1fs)\n", c.ok ? "PASS" : "FAIL", cr.id,
                cr.label, c.detail.c_str(), secs);
  }
  if (selected == 0) {
    std::fprintf(stderr, "unknown criterion selector: %s\n", which.c_str());
    return 2;
  }
  if (failed) std::printf("%d of %d criteria FAILED\n", failed, selected);
  return failed ? 1 : 0;
}
