#include <doctest.h>

#include <cmath>
#include <vector>

#include "orthocurv/manifold.hpp"
#include "orthocurv/sde.hpp"
#include "support/oracles.hpp"

using namespace orthocurv;

namespace {

ComparisonModel kahler_m4() {
  ComparisonModel m;
  m.kind = StructureKind::Kahler;
  m.k = 1.0;
  m.n = 2;
  m.m = 4.0;
  return m;
}

DiffusionConfig small_cfg() {
  DiffusionConfig cfg;
  cfg.model = kahler_m4();
  cfg.rho0 = 0.5;
  cfg.T = 0.05;
  cfg.dt = 1e-3;
  cfg.paths = 64;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("comparison drift values are the rhs closed form") {
  CHECK(comparison_rhs(kahler_m4(), 0.6) ==
        doctest::Approx(oracle::kSdeDriftKahlerM4).epsilon(1e-14));
  ComparisonModel q;
  q.kind = StructureKind::Quaternionic;
  q.k = 1.0;
  q.n = 2;
  q.m = 8.0;
  CHECK(comparison_rhs(q, 0.6) == doctest::Approx(oracle::kSdeDriftQuatM8).epsilon(1e-14));
}

TEST_CASE("rho ensemble is deterministic and thread-count invariant") {
  auto cfg = small_cfg();
  cfg.threads = 1;
  const auto a = simulate_rho(cfg);
  const auto b = simulate_rho(cfg);
  CHECK(a.content_hash == b.content_hash);

  cfg.threads = 4;
  const auto c = simulate_rho(cfg);
  CHECK(a.content_hash == c.content_hash);
  REQUIRE(a.per_path.size() == c.per_path.size());
  for (std::size_t i = 0; i < a.per_path.size(); i += 7)
    CHECK(a.per_path[i].terminal == c.per_path[i].terminal);
}

TEST_CASE("rho paths respect the barrier bookkeeping") {
  auto cfg = small_cfg();
  const auto ens = simulate_rho(cfg);
  CHECK(ens.hits == 0);
  CHECK(ens.underflows == 0);
  CHECK(ens.max_rho < cfg.resolved_barrier());
  CHECK(ens.max_rho > 0.0);
  CHECK(ens.mean_terminal > 0.0);
  CHECK(ens.min_dt_eff <= cfg.dt);
  CHECK(ens.mean_steps >= cfg.T / cfg.dt - 1);
}

TEST_CASE("drift-off diffusion has brownian moments") {
  DiffusionConfig cfg;
  cfg.model = kahler_m4();
  cfg.rho0 = 0.45;
  cfg.T = 0.01;
  cfg.dt = 1e-4;
  cfg.paths = 4000;
  cfg.seed = 9;
  cfg.drift_off = true;
  cfg.threads = 2;
  const auto ens = simulate_rho(cfg);
  CHECK(ens.hits == 0);
  // d rho = sqrt(2) d beta: Var(rho_T) = 2T, mean rho_T = rho0. Seeded run,
  // so the statistical tolerances are stable.
  CHECK(ens.mean_terminal == doctest::Approx(0.45).epsilon(0.02));
  CHECK(ens.var_terminal == doctest::Approx(2 * cfg.T).epsilon(0.10));
}

TEST_CASE("diffusion config validation") {
  auto cfg = small_cfg();
  cfg.rho0 = 2.0;  // beyond the kahler barrier pi/2
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_cfg();
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_cfg();
  cfg.paths = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_NOTHROW(small_cfg().validate());
}

TEST_CASE("quantile fan is monotone and reproducible") {
  auto cfg = small_cfg();
  const auto fan = simulate_rho_fan(cfg, 10);
  REQUIRE(fan.t.size() == 10);
  REQUIRE(fan.quantiles.size() == 10);
  CHECK(fan.t.back() == doctest::Approx(cfg.T).epsilon(1e-9));
  for (const auto& q : fan.quantiles)
    for (int j = 0; j + 1 < 5; ++j) CHECK(q[static_cast<std::size_t>(j)] <= q[static_cast<std::size_t>(j + 1)] + 1e-12);
  const auto fan2 = simulate_rho_fan(cfg, 10);
  for (std::size_t i = 0; i < fan.t.size(); ++i)
    CHECK(fan.quantiles[i][2] == fan2.quantiles[i][2]);
}

TEST_CASE("feller classification: comparison drift walls off both endpoints") {
  const auto rep = boundary_classification(kahler_m4());
  CHECK(rep.left_end == doctest::Approx(0.0));
  CHECK(rep.right_end == doctest::Approx(oracle::kPi / 2).epsilon(1e-12));
  // Near 0 the drift is ~ 3/rho (Bessel-4-like): entrance. Near pi/2 the
  // drift dives to -infinity like -tan: Sigma diverges, N converges.
  CHECK_FALSE(rep.left.accessible);
  CHECK_FALSE(rep.right.accessible);
  CHECK(rep.left.cls == "entrance");
  CHECK(rep.right.cls == "entrance");
  CHECK(rep.right.sigma_ratio >= 0.5);
}

TEST_CASE("feller classification: pure brownian endpoints are accessible") {
  const auto rep = boundary_classification_generic([](double) { return 0.0; }, 0.0,
                                                   oracle::kPi / 2);
  CHECK(rep.left.accessible);
  CHECK(rep.right.accessible);
  CHECK(rep.left.cls == "accessible");
  CHECK(rep.right.cls == "accessible");
}

TEST_CASE("manifold diffusion: flat moments, drift response, determinism") {
  const auto spec = catalog_entry("flat-c2");
  ManifoldDiffusionConfig cfg;
  cfg.p = Vec::Zero(4);
  cfg.q = Vec::Zero(4);
  cfg.T = 0.05;
  cfg.dt = 5e-4;
  cfg.paths = 500;
  cfg.seed = 21;
  cfg.n_dist = 20;
  cfg.threads = 1;

  SUBCASE("generator Delta gives E|X_T - X_0|^2 = 2 d T") {
    const auto ens = manifold_diffusion(spec, cfg);
    CHECK(ens.exits == 0);
    CHECK(ens.valid);
    CHECK(ens.mean_sq_disp == doctest::Approx(2.0 * 4 * cfg.T).epsilon(0.10));

    auto cfg3 = cfg;
    cfg3.threads = 3;
    const auto ens3 = manifold_diffusion(spec, cfg3);
    CHECK(ens3.content_hash == ens.content_hash);
  }
  SUBCASE("constant Z shifts the displacement second moment") {
    auto drifted = cfg;
    drifted.Z.push_back(dsl::Expression::parse("20"));
    for (int i = 0; i < 3; ++i) drifted.Z.push_back(dsl::Expression::parse("0"));
    const auto ens = manifold_diffusion(spec, drifted);
    CHECK(ens.valid);
    // E|X_T - X_0|^2 = |Z|^2 T^2 + 2 d T = 1.0 + 0.4 on the flat chart.
    CHECK(ens.mean_sq_disp == doctest::Approx(1.4).epsilon(0.08));
  }
}

TEST_CASE("manifold diffusion tracks radial distance through the closed form") {
  const auto spec = catalog_entry("cp2");
  ManifoldDiffusionConfig cfg;
  cfg.p = Vec::Zero(4);
  cfg.q = (Vec(4) << 0.2, -0.1, 0.15, 0.05).finished();
  cfg.T = 0.02;
  cfg.dt = 5e-4;
  cfg.paths = 100;
  cfg.seed = 33;
  cfg.n_dist = 5;
  const auto ens = manifold_diffusion(spec, cfg);
  CHECK(std::isfinite(ens.max_r));
  CHECK(ens.max_r > 0.0);
  long long finite = 0;
  for (const auto& ps : ens.per_path)
    if (std::isfinite(ps.terminal_r)) ++finite;
  CHECK(finite > 90);
}
