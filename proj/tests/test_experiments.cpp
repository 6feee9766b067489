#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "orthocurv/experiments.hpp"
#include "orthocurv/report.hpp"
#include "support/oracles.hpp"

using namespace orthocurv;

namespace {

ComparisonModel mz_model(StructureKind kind, int n) {
  ComparisonModel m;
  m.kind = kind;
  m.n = n;
  m.k = 1.0;
  return m;
}

}  // namespace

TEST_CASE("hypothesis scan: cp2 equality anchor") {
  const auto spec = catalog_entry("cp2");
  const auto scan = measure_hypotheses(spec, mz_model(StructureKind::Kahler, 2), nullptr,
                                       nullptr, 60, 7);
  CHECK(scan.ok);
  CHECK_FALSE(scan.ric_perp_vacuous);
  CHECK(scan.min_ric_perp == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(scan.min_sect == doctest::Approx(4.0).epsilon(1e-7));
  // min(Ric_perp/(m-2), H/4) = min(1, 1) = 1.
  CHECK(scan.k_admissible == doctest::Approx(1.0).epsilon(1e-7));
  // Printed normalization divides by 2m - 2 = 6 instead.
  CHECK(scan.k_admissible_printed == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
  CHECK(scan.c_measured == doctest::Approx(0.0));
}

TEST_CASE("hypothesis scan: vacuous and degenerate entries") {
  SUBCASE("s2-polar: structure span is everything, sectional constant rules") {
    const auto scan = measure_hypotheses(catalog_entry("s2-polar"),
                                         mz_model(StructureKind::Kahler, 1), nullptr, nullptr,
                                         40, 7);
    CHECK(scan.ric_perp_vacuous);
    CHECK(scan.ok);
    CHECK(scan.k_admissible == doctest::Approx(0.25).epsilon(1e-7));  // H/4 = 1/4
  }
  SUBCASE("hp1: Q/12 = 1") {
    const auto scan = measure_hypotheses(catalog_entry("hp1"),
                                         mz_model(StructureKind::Quaternionic, 1), nullptr,
                                         nullptr, 40, 7);
    CHECK(scan.ric_perp_vacuous);
    CHECK(scan.k_admissible == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("cp1xcp1: mixed directions squeeze min Ric_perp toward its true infimum 0") {
    const auto scan = measure_hypotheses(catalog_entry("cp1xcp1"),
                                         mz_model(StructureKind::Kahler, 2), nullptr, nullptr,
                                         300, 7);
    CHECK_FALSE(scan.ric_perp_vacuous);
    // H ranges over [2, 4]; the sampled minimum sits just above 2, so the
    // sectional term min_sect/4 stays near 1/2 while Ric_perp = 4 - H dips
    // toward 0 and decides k.
    CHECK(scan.min_sect >= 2.0 - 1e-9);
    CHECK(scan.min_sect < 2.2);
    CHECK(scan.min_ric_perp < 0.5);
    CHECK(scan.k_admissible ==
          doctest::Approx(scan.min_ric_perp / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("hypothesis scan: gradient flavor has no sectional term") {
  const auto spec = catalog_entry("flat-c2");
  auto model = mz_model(StructureKind::Kahler, 2);
  model.flavor = Flavor::GradientBoundedPhi;
  const auto phi = dsl::Expression::parse("x1^2 + x2^2 + x3^2 + x4^2");
  const auto scan = measure_hypotheses(spec, model, &phi, nullptr, 60, 7);
  // Ric_perp + Hess phi = 2 Id on flat space; k = 2/dperp = 1 even though the
  // flat sectional curvature would zero out the non-gradient normalization.
  CHECK(scan.ok);
  CHECK(scan.k_admissible == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(scan.c_measured > 0.0);
  // sup |phi| grows to the sampling boundary.
  CHECK(scan.phi_sup_radius > 0.9 * scan.max_chart_radius);
}

TEST_CASE("riemann identity scan is clean on curved entries") {
  for (const char* name : {"cp2", "hp2"}) {
    CAPTURE(name);
    const auto scan = riemann_identity_scan(catalog_entry(name), 20, 3);
    CHECK(scan.sym < 1e-9);
    CHECK(scan.bianchi < 1e-9);
    if (std::string(name) == "cp2") CHECK(scan.j_invariance < 1e-9);
  }
}

TEST_CASE("conformal canary perturbs the metric but keeps the chart") {
  const auto base = catalog_entry("cp2");
  const auto canary = conformal_canary(base, 0.05);
  CHECK(canary.name == "cp2-canary");
  CHECK(canary.kind == base.kind);
  CHECK_FALSE(canary.hermitian.present());
  CHECK_FALSE(static_cast<bool>(canary.closed_distance));
  CHECK(std::isnan(canary.anchors.einstein_c));

  const double p[4] = {0.2, -0.1, 0.15, 0.05};
  const Mat g0 = base.metric_values(p);
  const Mat g1 = canary.metric_values(p);
  const double factor = 1.0 + 0.05 * std::sin(p[0]);
  CHECK((g1 - factor * g0).cwiseAbs().maxCoeff() < 1e-12);

  // The textual twin was rewrapped too.
  REQUIRE(canary.metric_dsl.size() == 16);
  const double v = canary.metric_dsl[0].eval_value(p, 4);
  CHECK(v == doctest::Approx(g1(0, 0)).epsilon(1e-12));
}

TEST_CASE("comparison sweep: cp2 equality on a coarse grid") {
  const auto spec = catalog_entry("cp2");
  const auto sweep = comparison_sweep(spec, mz_model(StructureKind::Kahler, 2), Vec::Zero(4),
                                      {0.3, 0.6, 0.9}, 4, nullptr, nullptr, 40, 7);
  CHECK(sweep.verdict == "PASS");
  CHECK(sweep.equality);
  CHECK(sweep.directions == 4);
  REQUIRE(sweep.r.size() == 3);
  for (double m : sweep.margin) CHECK(std::abs(m) < 1e-4);
  CHECK(sweep.model.k == doctest::Approx(1.0).epsilon(1e-6));
  // Printed margins use the same kahler rhs here.
  CHECK(sweep.margin_printed.size() == 3);
}

TEST_CASE("comparison sweep drops grid points beyond the barrier") {
  const auto spec = catalog_entry("cp2");
  const auto sweep = comparison_sweep(spec, mz_model(StructureKind::Kahler, 2), Vec::Zero(4),
                                      {0.5, 1.0, 1.55, 1.7}, 3, nullptr, nullptr, 30, 7);
  CHECK(sweep.dropped_beyond_barrier == 2);  // 1.55 and 1.7 vs 0.985 * pi/2
  CHECK(sweep.r.size() == 2);
}

TEST_CASE("riccati sweep passes with the C = 0 anchor") {
  const auto sweep = riccati_sweep(mz_model(StructureKind::Kahler, 2), 3, 11);
  CHECK(sweep.verdict == "PASS");
  CHECK(sweep.cases == 3);
  CHECK(sweep.min_slack >= -1e-6);
  CHECK(sweep.blowdown_closed == doctest::Approx(oracle::kPi).epsilon(1e-12));
  CHECK(std::abs(sweep.blowdown_ode - sweep.blowdown_closed) <= 1e-3);
}

TEST_CASE("lemma sweep holds on cp2") {
  const auto sweep = lemma_sweep(catalog_entry("cp2"), 2, 13);
  CHECK(sweep.verdict == "PASS");
  CHECK(sweep.cases == 2);
  CHECK(sweep.min_margin_gradient >= 0.0);
  CHECK(sweep.min_margin_lie >= 0.0);
  CHECK(sweep.max_identity_defect < 1e-4);
}

TEST_CASE("small-r limits recover the structure codimension") {
  struct Row {
    const char* name;
    double expected;
  };
  const Row rows[] = {{"cp2", 2.0}, {"hp2", 4.0}, {"s2-polar", 0.0}, {"flat-h1", 0.0}};
  for (const auto& row : rows) {
    CAPTURE(row.name);
    const auto out = small_r_limit(catalog_entry(row.name), 7);
    CHECK(out.expected == doctest::Approx(row.expected));
    CHECK(std::abs(out.extrapolated - row.expected) < 1e-3);
    CHECK(out.verdict == "PASS");
  }
}

TEST_CASE("diameter outcome on cp2") {
  const auto out = diameter_outcome(catalog_entry("cp2"), mz_model(StructureKind::Kahler, 2),
                                    nullptr, nullptr, 40, 7);
  CHECK(out.verdict == "PASS");
  CHECK(out.holds);
  CHECK(out.bound == doctest::Approx(oracle::kPi / 2).epsilon(1e-6));
  CHECK(out.estimate > 1.40);
  CHECK(out.estimate <= out.bound + 1e-3);
  CHECK(out.sharpness > 0.9);
}

TEST_CASE("diameter outcome refuses unbounded potentials") {
  auto model = mz_model(StructureKind::Kahler, 2);
  model.flavor = Flavor::GradientBoundedPhi;
  const auto phi = dsl::Expression::parse("x1^2 + x2^2 + x3^2 + x4^2");
  const auto out = diameter_outcome(catalog_entry("flat-c2"), model, &phi, nullptr, 20, 7);
  CHECK(out.verdict == "NOT-APPLICABLE");
  CHECK_FALSE(out.reason.empty());
}

TEST_CASE("verify wrappers produce well-formed deterministic reports") {
  Config cfg;
  cfg.set("manifold", "cp2");
  cfg.set("seed", "7");

  SUBCASE("limits") {
    auto res = verify_limits(cfg);
    CHECK(res.verdict == "PASS");
    CHECK(res.exit_code() == 0);
    REQUIRE(res.report.find("experiment") != nullptr);
    REQUIRE(res.report.find("verdict") != nullptr);
    const std::string once = finalize_report(res.report);
    auto res2 = verify_limits(cfg);
    CHECK(finalize_report(res2.report) == once);
  }
  SUBCASE("structure") {
    auto res = verify_structure(cfg);
    CHECK(res.verdict == "PASS");
  }
}

TEST_CASE("verify_comparison rejects mismatched model kinds") {
  Config cfg;
  cfg.set("manifold", "cp2");
  cfg.set("comparison.kind", "quaternionic");
  CHECK_THROWS_AS((void)verify_comparison(cfg), ConfigError);
}
