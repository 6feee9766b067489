#pragma once

#include "orthocurv/dsl.hpp"
#include "orthocurv/geodesic.hpp"
#include "orthocurv/manifold.hpp"

namespace orthocurv {

// Quadrature check of one integral lemma along a unit-speed geodesic.
// lhs/rhs are the two sides as printed (rhs with the provable constant);
// rhs_printed keeps the literal printed constant when it differs.
// identity_rhs is the exact integration-by-parts form of the lhs, an
// independent consistency probe (|lhs - identity_rhs| should be quadrature
// noise). c_measured is the sampled sup of |phi| resp. |V|_g along the path.
struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rhs_printed = 0.0;
  double identity_rhs = 0.0;
  double c_measured = 0.0;
  double c_used = 0.0;
  bool holds = false;          // lhs <= rhs + 1e-8
  bool holds_printed = false;  // lhs <= rhs_printed + 1e-8
};

// integral f^2 Hess(phi)(gdot,gdot) <= 2 C sqrt(l) (integral ((f f')')^2)^{1/2}
// with |phi| <= C. C <= 0 means: measure C from the path samples.
// identity_rhs = 2 integral (f f')' phi. Throws ConfigError unless
// f(0) = f(l) = 0 within 1e-9.
LemmaCheck gradient_lemma_check(const ManifoldSpec& spec, const dsl::Expression& phi,
                                const GeodesicPath& path, const Profile& profile,
                                double C = -1.0);

// integral f^2 (L_V g)(gdot,gdot) <= 4 C sqrt(l) (integral f^2 f'^2)^{1/2}
// with |V|_g <= C. The printed constant is C sqrt(l) (factor 4 missing; the
// Cauchy-Schwarz chain through the identity needs it), kept as rhs_printed.
// identity_rhs = -4 integral f f' g(V,gdot).
LemmaCheck lie_lemma_check(const ManifoldSpec& spec, const std::vector<dsl::Expression>& V,
                           const GeodesicPath& path, const Profile& profile, double C = -1.0);

}  // namespace orthocurv
