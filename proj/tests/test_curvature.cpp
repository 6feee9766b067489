#include <doctest.h>

#include <cmath>
#include <vector>

#include "orthocurv/config.hpp"
#include "orthocurv/curvature.hpp"
#include "orthocurv/manifold.hpp"
#include "support/oracles.hpp"

using namespace orthocurv;

namespace {

ManifoldSpec conformal_surface() {
  Config cfg;
  cfg.set("manifold.dim", "2");
  cfg.set("manifold.kind", "none");
  cfg.set("manifold.g11", "exp(0.2*sin(x1 + 2*x2))");
  cfg.set("manifold.g12", "0");
  cfg.set("manifold.g22", "exp(0.2*sin(x1 + 2*x2))");
  return manifold_from_config(cfg);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("catalog inventory") {
  const auto names = catalog_names();
  REQUIRE(names.size() == 12);
  for (const auto& n : names) CHECK_NOTHROW((void)catalog_entry(n));
  CHECK_THROWS_AS((void)catalog_entry("moebius"), ConfigError);
}

TEST_CASE("flat entries have vanishing curvature") {
  Rng rng(11);
  for (const char* name : {"flat-c1", "flat-c2", "flat-c3", "flat-h1", "flat-h2"}) {
    const auto spec = catalog_entry(name);
    for (int s = 0; s < 10; ++s) {
      Rng r = rng.fork(static_cast<std::uint64_t>(s));
      const Vec p = sample_point(spec, r);
      const Curvature c = curvature_at(spec, p.data());
      CHECK(max_abs(c.gamma) < 1e-12);
      CHECK(max_abs(c.riemann) < 1e-12);
      CHECK(c.ricci.cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(c.scalar) < 1e-12);
    }
  }
}

TEST_CASE("conformal surface matches the closed-form oracle") {
  const auto spec = conformal_surface();
  const Curvature c = curvature_at(spec, oracle::kConfPoint);

  CHECK(c.g(0, 0) == doctest::Approx(oracle::kConfE2Phi).epsilon(1e-12));
  CHECK(c.g(1, 1) == doctest::Approx(oracle::kConfE2Phi).epsilon(1e-12));
  CHECK(std::abs(c.g(0, 1)) < 1e-15);

  // Gamma^k_ij = d_i phi delta_jk + d_j phi delta_ik - d_k phi delta_ij.
  CHECK(c.chr(0, 0, 0) == doctest::Approx(oracle::kConfD1).epsilon(1e-10));
  CHECK(c.chr(0, 0, 1) == doctest::Approx(oracle::kConfD2).epsilon(1e-10));
  CHECK(c.chr(0, 1, 1) == doctest::Approx(-oracle::kConfD1).epsilon(1e-10));
  CHECK(c.chr(1, 0, 0) == doctest::Approx(-oracle::kConfD2).epsilon(1e-10));
  CHECK(c.chr(1, 0, 1) == doctest::Approx(oracle::kConfD1).epsilon(1e-10));
  CHECK(c.chr(1, 1, 1) == doctest::Approx(oracle::kConfD2).epsilon(1e-10));

  CHECK(c.riem(0, 1, 1, 0) == doctest::Approx(oracle::kConfR1221).epsilon(1e-9));
  Vec e1 = Vec::Zero(2), e2 = Vec::Zero(2);
  e1(0) = 1.0;
  e2(1) = 1.0;
  CHECK(c.sectional(e1, e2) == doctest::Approx(oracle::kConfGauss).epsilon(1e-9));
  CHECK(c.ricci(0, 0) == doctest::Approx(oracle::kConfRic11).epsilon(1e-9));
  CHECK(c.ricci(1, 1) == doctest::Approx(oracle::kConfRic11).epsilon(1e-9));
  CHECK(std::abs(c.ricci(0, 1)) < 1e-11);
  CHECK(c.scalar == doctest::Approx(2 * oracle::kConfGauss).epsilon(1e-9));
}

TEST_CASE("fubini-study metric components at a frozen point") {
  const auto spec = catalog_entry("cp2");
  const Mat g = spec.metric_values(oracle::kFsPoint);
  CHECK(g(0, 0) == doctest::Approx(oracle::kFsG00).epsilon(1e-15));
  CHECK(std::abs(g(0, 1) - oracle::kFsG01) < 1e-16);
  CHECK(g(0, 2) == doctest::Approx(oracle::kFsG02).epsilon(1e-15));
  CHECK(g(0, 3) == doctest::Approx(oracle::kFsG03).epsilon(1e-15));
  CHECK(g(1, 2) == doctest::Approx(oracle::kFsG12).epsilon(1e-15));
  CHECK(g(1, 3) == doctest::Approx(oracle::kFsG13).epsilon(1e-15));
  CHECK(g(2, 2) == doctest::Approx(oracle::kFsG22).epsilon(1e-15));
  CHECK(std::abs(g(2, 3) - oracle::kFsG23) < 1e-16);
  CHECK(g(1, 1) == doctest::Approx(g(0, 0)).epsilon(1e-15));
  CHECK(g(3, 3) == doctest::Approx(g(2, 2)).epsilon(1e-15));

  // Textual twin agrees with the callable route.
  REQUIRE(spec.metric_dsl.size() == 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double v = spec.metric_dsl[static_cast<std::size_t>(4 * i + j)].eval_value(
          oracle::kFsPoint, 4);
      CHECK(v == doctest::Approx(g(i, j)).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("einstein constants and structure sectionals on the curved catalog") {
  struct Row {
    const char* name;
    double c;
    double sect;  // H or Q when constant
    double scalar;
  };
  const Row rows[] = {
      {"cp1", oracle::kCp1EinsteinC, 4.0, 8.0},
      {"cp2", oracle::kCp2EinsteinC, 4.0, oracle::kCp2Scalar},
      {"cp3", oracle::kCp3EinsteinC, 4.0, 48.0},
      {"hp1", oracle::kHp1EinsteinC, 12.0, oracle::kHp1Scalar},
      {"hp2", oracle::kHp2EinsteinC, 12.0, oracle::kHp2Scalar},
      {"cp1xcp1", 4.0, std::numeric_limits<double>::quiet_NaN(), 16.0},
      {"s2-polar", 1.0, std::numeric_limits<double>::quiet_NaN(), 2.0},
  };
  Rng rng(23);
  for (const auto& row : rows) {
    CAPTURE(row.name);
    const auto spec = catalog_entry(row.name);
    for (int s = 0; s < 6; ++s) {
      Rng r = rng.fork(static_cast<std::uint64_t>(s) * 131 + 7);
      const Vec p = sample_point(spec, r);
      const Curvature c = curvature_at(spec, p.data());
      const auto fit = einstein_fit(c);
      CHECK(fit.c == doctest::Approx(row.c).epsilon(1e-8));
      CHECK(fit.residual < 1e-8);
      CHECK(c.scalar == doctest::Approx(row.scalar).epsilon(1e-8));
      if (std::isfinite(row.sect) && spec.kind != StructureKind::None) {
        const Vec v = sample_unit(spec, c.g, r);
        CHECK(structure_sectional(spec, c, v) == doctest::Approx(row.sect).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("cp1xcp1 mixed direction: H = 2 and Ric_perp = 2 at the origin") {
  const auto spec = catalog_entry("cp1xcp1");
  const double origin[4] = {0.0, 0.0, 0.0, 0.0};
  const Curvature c = curvature_at(spec, origin);
  Vec v(4);
  v << 1.0, 0.0, 1.0, 0.0;
  v /= std::sqrt(2.0);  // g = identity at the origin
  CHECK(c.ip(v, v) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(holomorphic_sectional(spec, c, v) ==
        doctest::Approx(oracle::kCp1xCp1MixedH).epsilon(1e-10));
  const auto rp = orthogonal_ricci(spec, c, v);
  CHECK(rp.via_decomposition == doctest::Approx(oracle::kCp1xCp1MixedRicPerp).epsilon(1e-10));
  CHECK(rp.via_frame_sum == doctest::Approx(oracle::kCp1xCp1MixedRicPerp).epsilon(1e-10));
}

TEST_CASE("orthogonal ricci routes agree and are frame-permutation invariant") {
  Rng rng(31);
  for (const char* name : {"cp2", "cp3", "hp2", "cp1xcp1"}) {
    const auto spec = catalog_entry(name);
    for (int s = 0; s < 8; ++s) {
      Rng r = rng.fork(static_cast<std::uint64_t>(s) * 977 + 5);
      const Vec p = sample_point(spec, r);
      const Curvature c = curvature_at(spec, p.data());
      const Vec v = sample_unit(spec, c.g, r);
      const auto a = orthogonal_ricci(spec, c, v);
      CHECK(std::abs(a.via_decomposition - a.via_frame_sum) < 1e-8);
      std::vector<int> perm(static_cast<std::size_t>(spec.dim));
      for (int i = 0; i < spec.dim; ++i) perm[static_cast<std::size_t>(i)] = spec.dim - 1 - i;
      const auto b = orthogonal_ricci(spec, c, v, &perm);
      CHECK(std::abs(a.via_frame_sum - b.via_frame_sum) < 1e-8);
    }
  }
}

TEST_CASE("orthogonal ricci requires a unit direction") {
  const auto spec = catalog_entry("cp2");
  const double origin[4] = {0.0, 0.0, 0.0, 0.0};
  const Curvature c = curvature_at(spec, origin);
  Vec v = Vec::Zero(4);
  v(0) = 2.0;
  CHECK_THROWS_AS((void)orthogonal_ricci(spec, c, v), NumericError);
}

TEST_CASE("structure diagnostics pass on the catalog") {
  for (const char* name : {"cp2", "hp2", "cp1xcp1", "s2-polar", "flat-c2", "flat-h1"}) {
    CAPTURE(name);
    const auto check = structure_check(catalog_entry(name), 12, 99);
    CHECK(check.pass());
  }
}

TEST_CASE("bakry-emery tensor contracts") {
  const auto spec = catalog_entry("flat-c2");
  const double p[4] = {0.3, -0.2, 0.5, 0.1};
  const Curvature c = curvature_at(spec, p);
  Vec v(4);
  v << 0.5, 0.5, 0.5, 0.5;  // flat metric: already unit

  std::vector<dsl::Expression> zero_z, linear_z;
  for (int i = 1; i <= 4; ++i) {
    zero_z.push_back(dsl::Expression::parse("0"));
    linear_z.push_back(dsl::Expression::parse("x" + std::to_string(i)));
  }

  SUBCASE("m = dim requires Z absent and reduces to Ric_perp") {
    // "Z identically zero" is spelled as an empty vector: with explicit
    // expressions the <Z,v>^2/(m - D) term is 0/0 at m = D, so it throws.
    const auto rp = orthogonal_ricci(spec, c, v);
    const std::vector<dsl::Expression> no_z;
    CHECK(bakry_emery_mz(spec, c, v, 4.0, no_z) ==
          doctest::Approx(rp.via_decomposition).epsilon(1e-12).scale(1.0));
    CHECK_THROWS_AS((void)bakry_emery_mz(spec, c, v, 4.0, zero_z), ConfigError);
    CHECK_THROWS_AS((void)bakry_emery_mz(spec, c, v, 4.0, linear_z), ConfigError);
    CHECK_THROWS_AS((void)bakry_emery_mz(spec, c, v, 3.0, no_z), ConfigError);
  }
  SUBCASE("linear Z on flat space: closed form") {
    // nabla Z = Id, so (nabla Z)^flat(v,v) = |v|^2 = 1 and <Z,v> = x.v.
    const double zv = p[0] * v(0) + p[1] * v(1) + p[2] * v(2) + p[3] * v(3);
    const double expected = 0.0 - 1.0 - zv * zv / (6.0 - 4.0);
    CHECK(bakry_emery_mz(spec, c, v, 6.0, linear_z) ==
          doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    // Lie derivative identity: L_Z g = 2 (nabla Z)^flat.
    const Mat lie = lie_derivative_metric(spec, linear_z, p);
    const Mat nzf = nabla_z_flat(spec, linear_z, p);
    CHECK((lie - 2.0 * nzf).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("gradient tensor adds the Hessian") {
    const auto phi = dsl::Expression::parse("x1^2 + x2^2 + x3^2 + x4^2");
    // Hess phi = 2 Id; Ric_perp = 0 on flat space.
    CHECK(bakry_emery_gradient(spec, c, v, phi) == doctest::Approx(2.0).epsilon(1e-10));
  }
}

TEST_CASE("chern-route holomorphic sectional agrees with the levi-civita route") {
  Rng rng(41);
  for (const char* name : {"cp1", "cp2"}) {
    const auto spec = catalog_entry(name);
    REQUIRE(spec.hermitian.present());
    for (int s = 0; s < 4; ++s) {
      Rng r = rng.fork(static_cast<std::uint64_t>(s) + 17);
      const Vec p = sample_point(spec, r);
      const Curvature c = curvature_at(spec, p.data());
      const Vec v = sample_unit(spec, c.g, r);
      const auto ch = chern_curvature(spec, p.data());
      CHECK(chern_holomorphic_sectional(spec, ch, p.data(), v) ==
            doctest::Approx(holomorphic_sectional(spec, c, v)).epsilon(1e-7));
    }
  }
}

TEST_CASE("closed-form distances match the frozen arccos values") {
  const auto cp2 = catalog_entry("cp2");
  REQUIRE(cp2.closed_distance);
  CHECK(cp2.closed_distance(Eigen::Map<const Vec>(oracle::kCp2PairP, 4),
                            Eigen::Map<const Vec>(oracle::kCp2PairQ, 4)) ==
        doctest::Approx(oracle::kCp2PairDist).epsilon(1e-13));

  const auto hp1 = catalog_entry("hp1");
  REQUIRE(hp1.closed_distance);
  CHECK(hp1.closed_distance(Eigen::Map<const Vec>(oracle::kCp2PairP, 4),
                            Eigen::Map<const Vec>(oracle::kCp2PairQ, 4)) ==
        doctest::Approx(oracle::kHp1PairDist).epsilon(1e-13));

  const auto s2 = catalog_entry("s2-polar");
  REQUIRE(s2.closed_distance);
  CHECK(s2.closed_distance(Eigen::Map<const Vec>(oracle::kS2PairA, 2),
                           Eigen::Map<const Vec>(oracle::kS2PairB, 2)) ==
        doctest::Approx(oracle::kS2PairDist).epsilon(1e-13));

  const auto cp1 = catalog_entry("cp1");
  REQUIRE(cp1.closed_distance);
  CHECK(cp1.closed_distance(Eigen::Map<const Vec>(oracle::kCp1PairA, 2),
                            Eigen::Map<const Vec>(oracle::kCp1PairB, 2)) ==
        doctest::Approx(oracle::kCp1PairDist).epsilon(1e-13));

  const auto prod = catalog_entry("cp1xcp1");
  REQUIRE(prod.closed_distance);
  CHECK(prod.closed_distance(Eigen::Map<const Vec>(oracle::kCp2PairP, 4),
                             Eigen::Map<const Vec>(oracle::kCp2PairQ, 4)) ==
        doctest::Approx(oracle::kCp1xCp1PairDist).epsilon(1e-13));
}

TEST_CASE("manifold_from_config rejections") {
  SUBCASE("missing metric entry") {
    Config cfg;
    cfg.set("manifold.dim", "2");
    cfg.set("manifold.g11", "1");
    CHECK_THROWS_AS((void)manifold_from_config(cfg), ConfigError);
  }
  SUBCASE("dimension over the jet limit") {
    Config cfg;
    cfg.set("manifold.dim", "10");
    CHECK_THROWS_AS((void)manifold_from_config(cfg), ConfigError);
  }
  SUBCASE("kahler needs even dimension") {
    Config cfg;
    cfg.set("manifold.dim", "3");
    cfg.set("manifold.kind", "kahler");
    for (const char* k : {"manifold.g11", "manifold.g22", "manifold.g33"}) cfg.set(k, "1");
    for (const char* k : {"manifold.g12", "manifold.g13", "manifold.g23"}) cfg.set(k, "0");
    CHECK_THROWS_AS((void)manifold_from_config(cfg), ConfigError);
  }
  SUBCASE("unknown kind") {
    Config cfg;
    cfg.set("manifold.dim", "2");
    cfg.set("manifold.kind", "octonionic");
    cfg.set("manifold.g11", "1");
    cfg.set("manifold.g12", "0");
    cfg.set("manifold.g22", "1");
    CHECK_THROWS_AS((void)manifold_from_config(cfg), ConfigError);
  }
}

TEST_CASE("samplers stay inside the chart domain") {
  Rng rng(55);
  for (const char* name : {"cp2", "hp1", "s2-polar", "cp1xcp1"}) {
    const auto spec = catalog_entry(name);
    for (int s = 0; s < 25; ++s) {
      Rng r = rng.fork(static_cast<std::uint64_t>(s) * 3 + 1);
      const Vec p = sample_point(spec, r);
      CHECK(spec.domain(p.data()) > 0.0);
    }
  }
}
