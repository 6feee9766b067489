#pragma once

#include "orthocurv/manifold.hpp"

namespace orthocurv {

// Adapted orthonormal frame at x, returned as matrix columns E_1..E_d:
// E_1 = v/|v|_g; E_2 = J E_1 (Kahler) or E_2,E_3,E_4 = I,J,K images
// (quaternionic); the rest by deterministic Gram-Schmidt over the chart basis
// in index order (or `perm` order), skipping candidates whose residual norm
// drops below 1e-8. Throws NumericError on zero v or completion failure.
Mat adapted_frame(const ManifoldSpec& spec, const Mat& g, const double* x, const Vec& v,
                  const std::vector<int>* perm = nullptr);

// ---- jet-valued linear algebra (frame fields for the Bochner identities) ----

// Vectors are d jets; matrices d*d row-major jets; gp is the packed
// upper-triangular metric (i <= j).

Jet jet_ip(const std::vector<Jet>& gp, int d, const std::vector<Jet>& a,
           const std::vector<Jet>& b);

// Solve sum_j g_ij x^j = b_i (Gaussian elimination, partial pivoting on
// values); raises an index, e.g. gradient components from df.
std::vector<Jet> jet_solve_sym(const std::vector<Jet>& gp, int d, const std::vector<Jet>& b);

// Full inverse metric as d*d row-major jets.
std::vector<Jet> jet_inverse_sym(const std::vector<Jet>& gp, int d);

// Apply d*d row-major jet matrix to a jet vector.
std::vector<Jet> jet_matvec(const std::vector<Jet>& S, int d, const std::vector<Jet>& v);

// Jet-valued adapted frame FIELD: same construction as adapted_frame but with
// every coefficient a jet, so the E_i can be differentiated. seeds holds the
// already-ordered jet seed vectors (E_1 and its structure images); the chart
// completion follows index order (or `perm` order). Returns d vectors of d
// jets.
std::vector<std::vector<Jet>> jet_adapted_frame(const std::vector<Jet>& gp, int d,
                                                const std::vector<std::vector<Jet>>& seeds,
                                                const std::vector<int>* perm = nullptr);

}  // namespace orthocurv
