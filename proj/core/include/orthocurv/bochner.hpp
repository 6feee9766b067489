#pragma once

#include "orthocurv/dsl.hpp"
#include "orthocurv/geodesic.hpp"
#include "orthocurv/manifold.hpp"

namespace orthocurv {

// All terms of the frame Bochner identity at a point q with |grad f|_g = 1:
//   (1/2) sum_{i>=i0} E_iE_i |grad f|^2
//     = Ric_perp(grad f, grad f) + g(grad f, grad lap_perp f)
//       + sum g(grad_{grad f} grad f, grad_{E_i} E_i)               [t4]
//       + sum (|grad_{E_i} grad f|^2 - 2 g(grad_{grad f} E_i, grad_{E_i} grad f)),
// i0 = 3 (Kahler) resp. 5 (quaternionic). Frame fields are jet-valued:
// E_1 = grad f/|grad f|, then structure images, then Gram-Schmidt over the
// chart fields (`perm` order). Individual terms are frame-dependent; only
// the residual is asserted.
struct BochnerTerms {
  double grad_norm = 0.0;      // |grad f|_g(q)
  double lhs_frame = 0.0;      // (1/2) sum E_iE_i |grad f|^2
  double lhs_lap_perp = 0.0;   // (1/2) lap_perp |grad f|^2 = lhs_frame - t4
  double ric_perp = 0.0;
  double grad_lap_term = 0.0;  // g(grad f, grad lap_perp f)
  double t4 = 0.0;
  double t5_norm = 0.0;        // sum |grad_{E_i} grad f|^2
  double t5_cross = 0.0;       // sum g(grad_{grad f} E_i, grad_{E_i} grad f)
  double residual = 0.0;       // identity defect, exact form
  // Literal printed form. Kahler: equals residual. The quaternionic source
  // states lhs = (1/2) lap_perp |grad f|^2 while keeping the t4 term and a
  // single -t5_cross, so its defect is residual - t4 - t5_cross.
  double residual_printed = 0.0;
  bool vacuous = false;  // no frame directions beyond the structure span
};

// Jet pipeline (f to order 3, metric to order 2). Throws NumericError unless
// |grad f(q)| = 1 within 1e-8 or the frame field degenerates at q.
BochnerTerms bochner_terms(const ManifoldSpec& spec, const dsl::Expression& f, const double* x,
                           const std::vector<int>* perm = nullptr);

// lap_perp f at x as a by-product of the same field construction (value of
// the order-1 jet field); cross-check against orthogonal_laplacian.
double lap_perp_field_value(const ManifoldSpec& spec, const dsl::Expression& f,
                            const double* x);

// Radial route, f = r: on the geodesics-module table the identity collapses
// (|grad r| = 1, grad_{grad r} grad r = 0, parallel frame kills t5_cross) to
//   0 = Ric_perp(gdot,gdot) + d/dr(lap_perp r) + sum_{i>=i0} |S E_i|^2.
// ric_perp comes from the curvature module at the sample point: the residual
// cross-validates the jet and ODE pipelines.
struct RadialBochnerSample {
  double r = 0.0;
  double ric_perp = 0.0;
  double d_lap_perp = 0.0;  // exact route from the table
  double s_norm2 = 0.0;     // sum_{i>=i0} |S E_i|^2
  double lap_perp = 0.0;
  double residual = 0.0;  // ric_perp + d_lap_perp + s_norm2
  // Modified-inequality slack: ric_perp + d_lap_perp + lap_perp^2/dperp <= 0
  // (Cauchy-Schwarz on s_norm2); margin = -(that sum) >= 0 up to tolerance.
  double modified_margin = 0.0;
  // Hypothesis term -2 sum Hess r(grad_{gdot} E_i, E_i): identically zero in
  // the parallel frame; the coordinate-frame value measures its frame
  // sensitivity.
  double cross_term_parallel = 0.0;
  double cross_term_coordinate = 0.0;
};
RadialBochnerSample radial_bochner(const ManifoldSpec& spec, const RadialTable& tab, int index);

}  // namespace orthocurv
