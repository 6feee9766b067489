#pragma once

#include <limits>
#include <string>
#include <vector>

#include "orthocurv/manifold.hpp"

namespace orthocurv {

// Which diameter/comparison hypothesis set a model instance encodes:
//   GradientBoundedPhi : Ric_perp + Hess(phi) lower bound with |phi| <= C
//   GradientRiccati    : same shape but r^2 |grad phi|^2 <= C (Riccati route)
//   NonGradientMZ      : Ric_perp_{m,Z} lower bound plus H (resp. Q) bound
enum class Flavor { GradientBoundedPhi, GradientRiccati, NonGradientMZ };

// k: curvature scale (> 0). n: complex resp. quaternionic dimension (>= 2
// for the bound formulas). m: effective dimension parameter, >= real dim.
// C: the flavor's potential/drift bound (>= 0).
struct ComparisonModel {
  StructureKind kind = StructureKind::Kahler;
  Flavor flavor = Flavor::NonGradientMZ;
  double k = 1.0;
  double m = 0.0;  // defaults to the real dimension when <= 0
  int n = 2;
  double C = 0.0;

  int real_dim() const { return kind == StructureKind::Kahler ? 2 * n : 4 * n; }
  // Codimension of the structure span {v, Jv} resp. {v, Iv, Jv, Kv}.
  int dperp() const { return kind == StructureKind::Kahler ? 2 * n - 2 : 4 * n - 4; }
  double m_eff() const { return m > 0.0 ? m : static_cast<double>(real_dim()); }
  void validate() const;  // throws ConfigError on bad fields
};

ComparisonModel comparison_model_from_config(const Config& cfg);

// s(k,t) = sin(sqrt(k) t), s'(k,t) = d/dt s = sqrt(k) cos(sqrt(k) t), so
// s'/s = sqrt(k) cot(sqrt(k) t) -> 1/t as t -> 0+.
double s_func(double k, double t);
double s_prime(double k, double t);
double s_ratio(double k, double t);  // s_prime/s_func

// Right end of the admissible radius interval for comparison_rhs:
// pi/(2 sqrt(k)) Kahler, pi/(2 sqrt(3k)) quaternionic.
double comparison_barrier(const ComparisonModel& model);

// Closed-form upper bound for L r at radius r. Kahler:
//   (m-2) s'(k,r)/s(k,r) + s'(4k,r)/s(4k,r).
// Quaternionic default replaces the printed single s'(12k)/s(12k) term with
// 3 s'(4k)/s(4k): the printed form breaks the flat limit rhs*r -> m-1
// (it gives m-3). printed=true evaluates the literal form instead.
// Throws ConfigError when r is outside (0, comparison_barrier).
double comparison_rhs(const ComparisonModel& model, double r, bool printed = false);

// r -> (m-1)/r head of comparison_rhs, for small-radius checks.
double comparison_rhs_head(const ComparisonModel& model, double r);

// Aligned lhs/rhs samples over an r grid with margins (rhs - lhs).
struct ComparisonReport {
  std::vector<double> r, lhs, rhs, margin;
  double worst_margin = 0.0;
  bool equality = false;  // |margin| < tol everywhere
  void finalize(double tol);
};

// The flavor's closed-form diameter bound:
//   GradientBoundedPhi  K: (pi/sqrt(k)) sqrt(1 + sqrt(2) C/(n-1))
//                       Q: (pi/sqrt(k)) sqrt(1 + sqrt(2) C/(2n-2))
//   GradientRiccati     K: (pi/sqrt((n-1)k)) sqrt(2 sqrt(C) + n-1)
//                       Q: (pi/sqrt((n-1)k)) sqrt(sqrt(C) + n-1)
//   NonGradientMZ       K: pi/(2 sqrt(k))    Q: pi/(2 sqrt(3k))
double diameter_bound(const ComparisonModel& model);

// Riccati comparison for u = Lap_perp r with coupling alpha > 0:
//   u' <= -c2 u^2 - c0,  c2 = alpha/(alpha^2 + dp*alpha + 4C),  c0 = dp*k,
// dp = dperp(). The bound is P cot(Q r) with P = sqrt(c0/c2), Q = sqrt(c0 c2).
double riccati_c0(const ComparisonModel& model);
double riccati_c2(const ComparisonModel& model, double alpha);
double riccati_bound(const ComparisonModel& model, double alpha, double r);
// First pole of the bound, pi/Q: the comparison-predicted blow-down radius.
double riccati_blowdown(const ComparisonModel& model, double alpha);

struct RiccatiSolution {
  std::vector<double> r, u;
  bool blew_down = false;
  double blow_down_r = std::numeric_limits<double>::quiet_NaN();
};

// Integrates u' = -c2 u^2 - c0 from the singular head u ~ (dp + alpha/2)/r,
// matched at r0 = 1e-4. Dense output on ~2000 grid points up to r_max;
// stops early (blew_down) once u < -1e8 or the state leaves double range.
RiccatiSolution riccati_ode_solve(const ComparisonModel& model, double alpha, double r_max);

}  // namespace orthocurv
