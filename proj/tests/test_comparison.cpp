#include <doctest.h>

#include <cmath>
#include <vector>

#include "orthocurv/comparison.hpp"
#include "orthocurv/lemmas.hpp"
#include "orthocurv/manifold.hpp"
#include "support/oracles.hpp"

using namespace orthocurv;

namespace {

ComparisonModel kahler_model(double k = 1.0, int n = 2, double m = 0.0) {
  ComparisonModel mdl;
  mdl.kind = StructureKind::Kahler;
  mdl.k = k;
  mdl.n = n;
  mdl.m = m;
  return mdl;
}

ComparisonModel quat_model(double k = 1.0, int n = 2, double m = 0.0) {
  ComparisonModel mdl;
  mdl.kind = StructureKind::Quaternionic;
  mdl.k = k;
  mdl.n = n;
  mdl.m = m;
  return mdl;
}

}  // namespace

TEST_CASE("s-functions: values and small-t head") {
  CHECK(s_func(1.0, 0.6) == doctest::Approx(std::sin(0.6)).epsilon(1e-15));
  CHECK(s_prime(1.0, 0.6) == doctest::Approx(std::cos(0.6)).epsilon(1e-15));
  CHECK(s_ratio(4.0, 0.7) == doctest::Approx(2.0 / std::tan(1.4)).epsilon(1e-13));
  // s'/s -> 1/t as t -> 0+.
  CHECK(s_ratio(2.5, 1e-5) * 1e-5 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("comparison barrier") {
  CHECK(comparison_barrier(kahler_model()) == doctest::Approx(oracle::kPi / 2).epsilon(1e-15));
  CHECK(comparison_barrier(quat_model()) ==
        doctest::Approx(oracle::kBarrierQuatK1).epsilon(1e-15));
  CHECK(comparison_barrier(kahler_model(4.0)) ==
        doctest::Approx(oracle::kPi / 4).epsilon(1e-15));
}

TEST_CASE("comparison rhs: frozen values and domain guard") {
  CHECK(comparison_rhs(kahler_model(), 0.5) ==
        doctest::Approx(oracle::kRhsKahlerM4K1R05).epsilon(1e-14));
  CHECK(comparison_rhs(quat_model(1.0, 2, 8.0), 0.3) ==
        doctest::Approx(oracle::kRhsQuatM8K1R03).epsilon(1e-14));
  CHECK(comparison_rhs(quat_model(1.0, 2, 8.0), 0.3, true) ==
        doctest::Approx(oracle::kRhsQuatM8K1R03Printed).epsilon(1e-14));
  CHECK_THROWS_AS((void)comparison_rhs(kahler_model(), 0.0), ConfigError);
  CHECK_THROWS_AS((void)comparison_rhs(kahler_model(), 1.6), ConfigError);
}

TEST_CASE("comparison rhs flat-limit head: corrected keeps m-1, printed loses 2") {
  const double r = 1e-3;
  CHECK(comparison_rhs_head(kahler_model(), r) == doctest::Approx(3.0 / r).epsilon(1e-15));
  CHECK(comparison_rhs(kahler_model(), r) * r == doctest::Approx(3.0).epsilon(1e-5));
  const auto q = quat_model(1.0, 2, 8.0);
  CHECK(comparison_rhs(q, r) * r == doctest::Approx(7.0).epsilon(1e-5));
  // The literal printed quaternionic form approaches m - 3 instead of m - 1.
  CHECK(comparison_rhs(q, r, true) * r == doctest::Approx(5.0).epsilon(1e-5));
}

TEST_CASE("diameter bounds by flavor") {
  auto mz = kahler_model();
  CHECK(diameter_bound(mz) == doctest::Approx(oracle::kPi / 2).epsilon(1e-14));
  auto mzq = quat_model();
  CHECK(diameter_bound(mzq) == doctest::Approx(oracle::kBarrierQuatK1).epsilon(1e-14));

  auto grad = kahler_model();
  grad.flavor = Flavor::GradientBoundedPhi;
  grad.C = 0.5;
  CHECK(diameter_bound(grad) == doctest::Approx(oracle::kDiamGradientC05N2K1).epsilon(1e-14));
  grad.C = 0.0;
  CHECK(diameter_bound(grad) == doctest::Approx(oracle::kPi).epsilon(1e-14));

  // Quaternionic bounded-phi with C = 1 shares the value: 1 + sqrt(2)/(2n-2).
  auto gq = quat_model();
  gq.flavor = Flavor::GradientBoundedPhi;
  gq.C = 1.0;
  CHECK(diameter_bound(gq) == doctest::Approx(oracle::kDiamGradientC05N2K1).epsilon(1e-14));

  auto ric = kahler_model();
  ric.flavor = Flavor::GradientRiccati;
  ric.C = 1.0;
  CHECK(diameter_bound(ric) == doctest::Approx(oracle::kDiamRiccatiC1N2K1).epsilon(1e-14));
}

TEST_CASE("model validation") {
  auto bad = kahler_model();
  bad.k = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = kahler_model();
  bad.m = 2.0;  // below the real dimension 4
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = kahler_model();
  bad.C = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_NOTHROW(kahler_model().validate());
}

TEST_CASE("model from config") {
  Config cfg;
  cfg.set("comparison.kind", "quaternionic");
  cfg.set("comparison.flavor", "gradient_riccati");
  cfg.set("comparison.k", "2.0");
  cfg.set("comparison.n", "2");
  cfg.set("comparison.C", "0.25");
  const auto m = comparison_model_from_config(cfg);
  CHECK(m.kind == StructureKind::Quaternionic);
  CHECK(m.flavor == Flavor::GradientRiccati);
  CHECK(m.k == doctest::Approx(2.0));
  CHECK(m.C == doctest::Approx(0.25));
  CHECK(m.real_dim() == 8);
  CHECK(m.dperp() == 4);

  Config bad;
  bad.set("comparison.flavor", "freestyle");
  CHECK_THROWS_AS((void)comparison_model_from_config(bad), ConfigError);
}

TEST_CASE("riccati bound: frozen closed form") {
  const auto mdl = kahler_model();  // dp = 2, c0 = 2k
  CHECK(riccati_c0(mdl) == doctest::Approx(2.0).epsilon(1e-15));

  auto with_c = mdl;
  with_c.C = 1.0;
  CHECK(riccati_c2(with_c, 1.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  CHECK(riccati_bound(with_c, 1.0, 0.8) ==
        doctest::Approx(oracle::kRiccatiBound08_C1A1).epsilon(1e-14));
  CHECK(riccati_blowdown(with_c, 1.0) ==
        doctest::Approx(oracle::kRiccatiBlowdown_C1A1).epsilon(1e-14));

  // C = 0, alpha -> 0: c2 -> 1/dp and the bound collapses to 2 sqrt(k) cot(sqrt(k) r).
  CHECK(riccati_c2(mdl, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(riccati_bound(mdl, 0.0, 0.7) == doctest::Approx(oracle::kRiccatiU07_C0).epsilon(1e-12));
  CHECK(riccati_blowdown(mdl, 0.0) == doctest::Approx(oracle::kPi).epsilon(1e-12));
}

TEST_CASE("riccati ode: C = 0 solution is 2 cot r with blow-down at pi") {
  const auto mdl = kahler_model();
  const auto sol = riccati_ode_solve(mdl, 0.0, 3.5);
  REQUIRE(sol.blew_down);
  CHECK(sol.blow_down_r == doctest::Approx(oracle::kPi).epsilon(1e-3));
  bool checked = false;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    if (std::abs(sol.r[i] - 1.0) < 2e-3) {
      CHECK(sol.u[i] == doctest::Approx(2.0 / std::tan(sol.r[i])).epsilon(1e-4));
      checked = true;
      break;
    }
  }
  CHECK(checked);
}

TEST_CASE("riccati ode stays under its closed-form bound") {
  auto mdl = kahler_model();
  mdl.C = 1.0;
  const double alpha = 1.0;
  const double pole = riccati_blowdown(mdl, alpha);
  const auto sol = riccati_ode_solve(mdl, alpha, pole * 0.98);
  REQUIRE(sol.r.size() > 100);
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    if (sol.r[i] >= pole) break;
    min_slack = std::min(min_slack, riccati_bound(mdl, alpha, sol.r[i]) - sol.u[i]);
  }
  CHECK(min_slack >= -1e-6);
}

TEST_CASE("comparison report finalize") {
  ComparisonReport rep;
  rep.r = {0.1, 0.2, 0.3};
  rep.lhs = {1.0, 2.0, 3.0};
  rep.rhs = {1.0, 2.00005, 2.9999};
  rep.finalize(1e-4);
  CHECK(rep.margin[2] == doctest::Approx(-0.0001));
  CHECK(rep.worst_margin == doctest::Approx(-0.0001));
  CHECK_FALSE(rep.equality);
  rep.rhs[2] = 2.99995;
  rep.finalize(1e-4);
  CHECK(rep.equality);
}

TEST_CASE("gradient lemma on cp2: inequality, measured C, and identity probe") {
  const auto spec = catalog_entry("cp2");
  Vec p = Vec::Zero(4), v = Vec::Zero(4);
  v(0) = 1.0;
  const auto path = integrate_geodesic(spec, p, v, 1.0);
  const auto phi = dsl::Expression::parse("0.3*sin(x1 + x2) + 0.1*x3");
  const auto chk = gradient_lemma_check(spec, phi, path, Profile::sin_pi(1.0));
  CHECK(chk.holds);
  CHECK(chk.lhs <= chk.rhs + 1e-8);
  CHECK(chk.c_measured > 0.0);
  CHECK(chk.c_used == doctest::Approx(chk.c_measured));
  CHECK(std::abs(chk.lhs - chk.identity_rhs) < 1e-5);

  // Explicit C scales the rhs linearly.
  const auto wide = gradient_lemma_check(spec, phi, path, Profile::sin_pi(1.0), 10.0);
  CHECK(wide.c_used == doctest::Approx(10.0));
  CHECK(wide.rhs == doctest::Approx(chk.rhs * 10.0 / chk.c_used).epsilon(1e-10));
  CHECK(wide.holds);

  CHECK_THROWS_AS(
      (void)gradient_lemma_check(spec, phi, path, Profile::constant_one()), ConfigError);
}

TEST_CASE("lie lemma on cp2: inequality and the printed-constant gap") {
  const auto spec = catalog_entry("cp2");
  Vec p = Vec::Zero(4), v = Vec::Zero(4);
  v(1) = 1.0;
  const auto path = integrate_geodesic(spec, p, v, 0.9);
  std::vector<dsl::Expression> V;
  V.push_back(dsl::Expression::parse("0.2 + 0.1*x2"));
  V.push_back(dsl::Expression::parse("0.1*x1"));
  V.push_back(dsl::Expression::parse("-0.05"));
  V.push_back(dsl::Expression::parse("0.15*x4"));
  const auto chk = lie_lemma_check(spec, V, path, Profile::sin_pi(0.9));
  CHECK(chk.holds);
  CHECK(std::abs(chk.lhs - chk.identity_rhs) < 1e-5);
  // rhs_printed is the literal constant, a factor 4 below the provable one.
  CHECK(chk.rhs == doctest::Approx(4.0 * chk.rhs_printed).epsilon(1e-12));
}
