#pragma once

#include "orthocurv/curvature.hpp"
#include "orthocurv/manifold.hpp"

namespace orthocurv {

// Fixed-step RK4 geodesic with stored samples. Step rule: h = min(1e-3,
// length/2000), halved until the unit-speed drift max |g(v,v)-1| < 1e-8.
struct GeodesicPath {
  const ManifoldSpec* spec = nullptr;
  double h = 0.0;
  std::vector<double> t;
  std::vector<Vec> x, v;
  double speed_drift = 0.0;
  double endpoint_error = std::numeric_limits<double>::quiet_NaN();  // set by shooting
  int segments() const { return static_cast<int>(t.size()) - 1; }
  double length() const { return t.back(); }
};

// v must be g-unit at p within 1e-9. Throws NumericError if the path leaves
// the chart domain (domain() <= 0) or the step underflows.
GeodesicPath integrate_geodesic(const ManifoldSpec& spec, const Vec& p, const Vec& v,
                                double length, double h = 0.0);

// Endpoint of the unit-speed geodesic from p in direction v after time t.
Vec exp_map(const ManifoldSpec& spec, const Vec& p, const Vec& v, double t);

// Parallel transport of the columns of W0 along the path (re-integrates the
// joint system on the stored grid). frames[s] are the columns at sample s.
std::vector<Mat> parallel_transport(const ManifoldSpec& spec, const GeodesicPath& path,
                                    const Mat& W0);

// Single-shooting distance. Coarse deterministic sweep of 64*(d-1) seeded
// directions (closest approach along each), then Gauss-Newton on (direction,
// length). Converged means endpoint error < 1e-7 * distance in g(q)-norm.
struct ShootResult {
  double distance = std::numeric_limits<double>::quiet_NaN();
  Vec direction;  // unit initial velocity at p
  GeodesicPath path;
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
};
ShootResult shoot_distance(const ManifoldSpec& spec, const Vec& p, const Vec& q);

// distance: shoot_distance with the injectivity-hint guard; throws
// NumericError when no direction converges, ConfigError when q lies beyond
// the hint.
ShootResult distance(const ManifoldSpec& spec, const Vec& p, const Vec& q);

// ---- radial machinery (Jacobi route) ----

// One dense pass along the unit-speed radial geodesic exp_base(t v): the
// matrix Jacobi equation J'' = -A(t) J (A_ab = R(E_a, gdot, gdot, E_b) in the
// parallel-transported normal frame E_2..E_d, J(0) = 0, J'(0) = Id) gives
// S = J' J^{-1} = Hess r restricted to that frame (the radial row/column
// vanish identically). Laplacians and the exact radial derivative
// d/dr(Delta_perp r) = -tr_perp(S^2 + A) are tabulated at every grid point;
// the t = 0 row holds NaN (S is singular there). hess_frame is the
// (d-1)x(d-1) normal block, structure images first.
struct RadialTable {
  std::vector<double> t;                 // grid, t[0] = t0
  std::vector<double> laplacian;         // Delta r(t) = tr S
  std::vector<double> orthogonal;        // Delta_perp r(t)
  std::vector<double> d_orthogonal;      // d/dr Delta_perp r(t), exact route
  std::vector<Vec> x;                    // chart position
  std::vector<Vec> grad;                 // gdot(t) = grad r
  std::vector<Mat> hess_frame;           // S(t), frame components (E_2..E_d block nonzero)
  std::vector<Mat> frame;                // transported frame columns
  // index of the grid point nearest to r (grid-aligned stencils)
  int index_at(double r) const;
};
RadialTable radial_table(const ManifoldSpec& spec, const Vec& base, const Vec& v,
                         double rmax, double h = 0.0);

// Hess r in chart coordinates at table index i.
Mat radial_hessian_coords(const RadialTable& tab, int i);

// Shooting route: resolves the minimizing geodesic q -> x and evaluates the
// radial table at its endpoint. Z (optional, d Expressions) adds Z r = <Z,
// grad r> to the drift field.
struct RadialDerivatives {
  double r = 0.0;
  Vec grad_r;
  Mat hess_r;  // chart components
  double laplacian_r = 0.0;
  double orthogonal_laplacian_r = 0.0;
  double d_orthogonal_dr = 0.0;
  double drift = 0.0;  // laplacian_r + Z r
};
RadialDerivatives radial_derivatives(const ManifoldSpec& spec, const Vec& base, const Vec& x,
                                     const std::vector<dsl::Expression>* Z = nullptr);

// Stencil cross-route: Delta r via 4th-order differences of distance-based
// Hessians is impractical; instead this differentiates the Jacobi-free
// quantity r(x) itself over a coordinate stencil to rebuild Hess r. Step
// h_r is Richardson-extrapolated (h and h/2). Heavy; used for cross-checks.
Mat radial_hessian_stencil(const ManifoldSpec& spec, const Vec& base, const Vec& x,
                           double h_r);

// ---- index forms ----

struct Profile {
  std::function<double(double)> f, fp, fpp;
  std::string name;
  static Profile sin_pi(double l);   // sin(pi t / l)
  static Profile constant_one();     // the literal j == 1 profile (flagged)
};

struct IndexFormValue {
  int frame_index = 0;  // 1-based E_i
  double value = 0.0;
  bool boundary_ok = true;
};

// Composite Simpson on the path grid of integral(f'^2 - f^2 R(E_i, gdot,
// gdot, E_i)). Boundary f(0) = f(l) = 0 enforced within 1e-9 unless
// allow_nonzero_boundary (values then flagged). Returns per-index values;
// aggregate = sum over requested indices.
struct IndexFormReport {
  std::vector<IndexFormValue> per_index;
  double aggregate = 0.0;
};
IndexFormReport index_form(const ManifoldSpec& spec, const GeodesicPath& path,
                           const std::vector<Mat>& frames, const Profile& profile,
                           const std::vector<int>& frame_indices,
                           bool allow_nonzero_boundary = false);

}  // namespace orthocurv
