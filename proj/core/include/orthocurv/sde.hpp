#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "orthocurv/comparison.hpp"
#include "orthocurv/dsl.hpp"
#include "orthocurv/manifold.hpp"

namespace orthocurv {

// 1-D comparison diffusion d rho = sqrt(2) d beta + b(rho) dt with
// b = comparison_rhs(model, .). Barrier defaults to comparison_barrier.
struct DiffusionConfig {
  ComparisonModel model;
  double rho0 = 0.5;
  double T = 10.0;
  double dt = 1e-4;
  long long paths = 10000;
  std::uint64_t seed = 0;
  double barrier = 0.0;    // <= 0 means comparison_barrier(model)
  double eps_floor = 1e-6; // reflection guard near 0
  bool drift_off = false;  // test hook: pure Brownian
  int threads = 1;         // worker count; the ensemble is thread-count invariant
  double resolved_barrier() const;
  void validate() const;  // ConfigError on violations
};

struct PathStat {
  double terminal = 0.0;
  double max_rho = 0.0;
  bool hit = false;
  double hit_time = std::numeric_limits<double>::quiet_NaN();
  bool underflow = false;
};

struct DiffusionEnsemble {
  std::vector<PathStat> per_path;
  long long hits = 0;
  long long underflows = 0;
  double max_rho = 0.0;        // over surviving paths
  double mean_terminal = 0.0;  // over surviving, non-hit paths
  double var_terminal = 0.0;
  double min_dt_eff = 0.0;
  double mean_steps = 0.0;
  std::uint64_t content_hash = 0;  // FNV over per-path stat bytes, path order
};

// Euler-Maruyama with singularity-aware substepping:
// dt_eff = min(dt, 0.1 d/|b|, d^2/128) where d = min(rho, barrier - rho);
// the quadratic cap keeps the sqrt(2 dt) noise jump well under d. Reflection
// at eps_floor; hit detected at sample times when rho >= barrier - 1e-9
// (path stops). dt_eff < 1e-14 flags the path underflowed and excludes it
// from aggregates. Per-path streams are forked from the seed by path index,
// so any parallel schedule reproduces the same ensemble.
DiffusionEnsemble simulate_rho(const DiffusionConfig& cfg);

// Decimated quantile fan of the same ensemble (re-simulates; config + seed
// reproduce simulate_rho path by path). Rows are checkpoint times.
struct RhoFan {
  std::vector<double> t;
  std::vector<std::array<double, 5>> quantiles;  // 5, 25, 50, 75, 95 percent
};
RhoFan simulate_rho_fan(const DiffusionConfig& cfg, int n_times);

// Feller test for one endpoint of (0, barrier) via the ladder
// eps in {1e-2, 1e-3, 1e-4}: Sigma(eps) = int (s(x) - s(endpoint+eps)) m dx
// decides accessibility, N(eps) the entrance property. Divergence is read
// from the ratio of successive ladder increments (>= 0.5 divergent,
// <= 0.25 convergent, else inconclusive).
struct EndpointClass {
  std::array<double, 3> sigma{};  // Sigma(eps) on the ladder
  std::array<double, 3> nval{};   // N(eps) on the ladder
  double sigma_ratio = 0.0;
  double n_ratio = 0.0;
  bool accessible = false;
  std::string cls;  // accessible | entrance | natural | inconclusive
};

struct BoundaryReport {
  double left_end = 0.0, right_end = 0.0;
  EndpointClass left, right;
};

// Generic drift on (left, right) with unit diffusion a = 1 (noise sqrt(2)).
BoundaryReport boundary_classification_generic(const std::function<double(double)>& b,
                                               double left, double right);
// Comparison-drift specialization on (0, comparison_barrier(model)).
BoundaryReport boundary_classification(const ComparisonModel& model, bool printed = false);

// Chart diffusion with generator Lap + Z: dX = sqrt(2) sigma dW + (b_Delta +
// Z) dt, sigma sigma^T = g^{-1}, b_Delta^k = -g^{ij} Gamma^k_{ij}. Radial
// distance from `p` is tracked on a decimated grid (every n_dist steps) via
// the catalog closed-form distance when present (shooting is too costly
// inside path loops; max_r stays NaN without it).
struct ManifoldDiffusionConfig {
  std::vector<dsl::Expression> Z;  // empty = pure Laplace-Beltrami
  Vec p, q;                        // radial base and start (q != p)
  double T = 1.0;
  double dt = 1e-3;
  long long paths = 1000;
  std::uint64_t seed = 0;
  int n_dist = 100;
  int threads = 1;
};

struct ManifoldPathStat {
  double terminal_r = std::numeric_limits<double>::quiet_NaN();
  double max_r = std::numeric_limits<double>::quiet_NaN();
  double sq_disp = 0.0;  // chart |X_T - X_0|^2 (flat-entry moment checks)
  bool exited = false;
};

struct ManifoldEnsemble {
  std::vector<ManifoldPathStat> per_path;
  long long exits = 0;
  double max_r = std::numeric_limits<double>::quiet_NaN();
  double mean_sq_disp = 0.0;  // over surviving paths
  bool valid = true;          // exits <= 1% of paths
  std::uint64_t content_hash = 0;
};

ManifoldEnsemble manifold_diffusion(const ManifoldSpec& spec, const ManifoldDiffusionConfig& cfg);

}  // namespace orthocurv
