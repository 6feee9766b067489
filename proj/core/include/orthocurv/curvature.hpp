#pragma once

#include <complex>

#include "orthocurv/manifold.hpp"

namespace orthocurv {

// Pointwise curvature package from order-2 metric jets. Sign convention fixed
// by R(X,Y,Z,W) = g((nabla_X nabla_Y - nabla_Y nabla_X - nabla_{[X,Y]})Z, W);
// the round sphere has positive sectional curvature under it.
struct Curvature {
  int dim = 0;
  Vec x;
  Mat g, ginv;
  std::vector<double> gamma;    // Gamma^k_{ij}, index (k*d + i)*d + j, sym in i,j
  std::vector<double> riemann;  // R_{ijkl} all-lower, index ((i*d + j)*d + k)*d + l
  Mat ricci;                    // Ric_{jk} = g^{il} R_{ijkl}
  double scalar = 0.0;

  double chr(int k, int i, int j) const {
    return gamma[static_cast<std::size_t>((k * dim + i) * dim + j)];
  }
  double riem(int i, int j, int k, int l) const {
    return riemann[static_cast<std::size_t>(((i * dim + j) * dim + k) * dim + l)];
  }
  // Multilinear contraction R(X,Y,Z,W).
  double r4(const Vec& X, const Vec& Y, const Vec& Z, const Vec& W) const;
  // Plane sectional curvature R(u,v,v,u)/(|u|^2|v|^2 - g(u,v)^2).
  double sectional(const Vec& u, const Vec& v) const;

  double ip(const Vec& u, const Vec& v) const { return u.dot(g * v); }
  double norm(const Vec& v) const { return std::sqrt(std::max(0.0, ip(v, v))); }
};

Curvature curvature_at(const ManifoldSpec& spec, const double* x);

// Christoffels only (order-1 metric jets); integrator hot path.
void christoffel_at(const ManifoldSpec& spec, const double* x, Mat& ginv,
                    std::vector<double>& gamma);

// H(v) = R(v,Jv,Jv,v)/g(v,v)^2; scale-invariant. Kahler specs only.
double holomorphic_sectional(const ManifoldSpec& spec, const Curvature& c, const Vec& v);
// Q(v) = sum over S in {I,J,K} of R(v,Sv,Sv,v), over g(v,v)^2. Quaternionic only.
double quaternionic_sectional(const ManifoldSpec& spec, const Curvature& c, const Vec& v);
// Dispatches H or Q by spec.kind.
double structure_sectional(const ManifoldSpec& spec, const Curvature& c, const Vec& v);

// Ric^perp(v,v) for unit v (|g(v,v)-1| <= 1e-9 enforced), two routes:
// Ric(v,v) - H(v) (resp. - Q(v)), and the frame sum over the completion of
// span{v, Jv} (resp. span{v, Iv, Jv, Kv}). `perm` optionally shuffles the
// Gram-Schmidt candidate order (frame-independence tests).
struct RicPerp {
  double via_decomposition = 0.0;
  double via_frame_sum = 0.0;
};
RicPerp orthogonal_ricci(const ManifoldSpec& spec, const Curvature& c, const Vec& v,
                         const std::vector<int>* perm = nullptr);

// Least-squares Einstein constant c = tr(g^{-1} Ric)/d and max |Ric - c g|.
struct EinsteinFit {
  double c = 0.0;
  double residual = 0.0;
};
EinsteinFit einstein_fit(const Curvature& c);

// ---- scalar calculus ----

// Gradient (nabla f)^i = g^{ij} d_j f; f evaluated to order >= 1.
Vec gradient(const ManifoldSpec& spec, const dsl::Expression& f, const double* x);
// Hess f_{ij} = d_i d_j f - Gamma^k_{ij} d_k f (order-2 f, order-1 metric).
Mat hessian(const ManifoldSpec& spec, const dsl::Expression& f, const double* x);
double laplacian(const ManifoldSpec& spec, const dsl::Expression& f, const double* x);

// Hessian trace over the adapted-frame directions orthogonal to span{grad f,
// J grad f} (Kahler) resp. span{grad f, I,J,K grad f} (quaternionic); `perm`
// shuffles the Gram-Schmidt completion (result is invariant). Riemannian kind
// traces over everything but grad f itself. Errors on vanishing gradient.
double orthogonal_laplacian(const ManifoldSpec& spec, const dsl::Expression& f,
                            const double* x, const std::vector<int>* perm = nullptr);

// ---- Bakry-Emery pieces ----

// (nabla Z)^flat_{ij} = (1/2)(g_{ik} nabla_j Z^k + g_{jk} nabla_i Z^k); Z is a
// contravariant vector field of Expressions.
Mat nabla_z_flat(const ManifoldSpec& spec, const std::vector<dsl::Expression>& Z,
                 const double* x);
// Full Lie derivative (L_Z g)_{ij}; equals 2 * nabla_z_flat as an identity.
Mat lie_derivative_metric(const ManifoldSpec& spec, const std::vector<dsl::Expression>& Z,
                          const double* x);

// Ric^perp_{m,Z}(v,v) = Ric^perp(v,v) - (nabla Z)^flat(v,v) - <Z,v>^2/(m - D),
// unit v. D is the real dimension by default; printed_denominator uses the
// structure dimension instead. m = D requires Z identically zero (term
// dropped); m < D is a ConfigError.
double bakry_emery_mz(const ManifoldSpec& spec, const Curvature& c, const Vec& v, double m,
                      const std::vector<dsl::Expression>& Z, bool printed_denominator = false);

// Gradient-type tensor (Ric^perp + Hess phi)(v,v), unit v.
double bakry_emery_gradient(const ManifoldSpec& spec, const Curvature& c, const Vec& v,
                            const dsl::Expression& phi);

// ---- structure diagnostics ----

// Covariant derivative of structure tensor `which`:
// (nabla_a S)^i_j = d_a S^i_j + Gamma^i_{ak} S^k_j - Gamma^k_{aj} S^i_k,
// returned as d*d*d array, index (a*d + i)*d + j.
std::vector<double> structure_covariant_derivative(const ManifoldSpec& spec,
                                                   const Curvature& c, int which);

// Sampled structure diagnostics: algebraic identities (S^2 = -Id, IJ = K,
// skew-compatibility), metric SPD margin, and parallelism (Kahler: max
// |nabla J|; quaternionic: Frobenius residual of projecting nabla_a S onto
// span{I,J,K}).
struct StructureCheck {
  int samples = 0;
  double alg_residual = 0.0;
  double parallel_residual = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  bool pass(double alg_tol = 1e-9, double par_tol = 1e-7) const {
    return alg_residual < alg_tol && parallel_residual < par_tol && min_eigenvalue > 1e-10;
  }
};
StructureCheck structure_check(const ManifoldSpec& spec, int sample_count,
                               std::uint64_t seed);

// Draws a point inside the chart domain: the spec sampler when present, else
// rejection from a centered box.
Vec sample_point(const ManifoldSpec& spec, Rng& rng);
// Unit tangent vector at x, g-normalized from a Gaussian draw.
Vec sample_unit(const ManifoldSpec& spec, const Mat& g, Rng& rng);

// ---- Chern-route cross-check (Kahler entries carrying Hermitian data) ----

// R_{i jbar k lbar} = -d^2 g_{i jbar}/dz_k dzbar_l
//                     + sum_{p,q} g^{q pbar} (d g_{i pbar}/dz_k)(d g_{q jbar}/dzbar_l),
// Wirtinger derivatives taken on the real-chart jets of re/im parts.
struct ChernCurvature {
  int n = 0;
  std::vector<std::complex<double>> r;  // index ((i*n + j)*n + k)*n + l
  std::complex<double> at(int i, int j, int k, int l) const {
    return r[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
};
ChernCurvature chern_curvature(const ManifoldSpec& spec, const double* x);

// H via the Chern route: 2 R(c, cbar, c, cbar)/h(c,cbar)^2 with c the complex
// components of v; the dictionary constant 2 is fixed against the Levi-Civita
// route on cp1 at the origin.
double chern_holomorphic_sectional(const ManifoldSpec& spec, const ChernCurvature& ch,
                                   const double* x, const Vec& v);

}  // namespace orthocurv
