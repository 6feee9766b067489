#include "orthocurv/frames.hpp"

namespace orthocurv {

namespace {
inline int pidx(int d, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}
}  // namespace

Mat adapted_frame(const ManifoldSpec& spec, const Mat& g, const double* x, const Vec& v,
                  const std::vector<int>* perm) {
  const int d = spec.dim;
  auto ip = [&](const Vec& a, const Vec& b) { return a.dot(g * b); };
  std::vector<Vec> frame;
  frame.reserve(static_cast<std::size_t>(d));

  const double nv = std::sqrt(std::max(0.0, ip(v, v)));
  if (!(nv > 1e-14)) throw NumericError("adapted_frame: zero tangent vector");
  frame.push_back(v / nv);

  for (int s = 0; s < structure_count(spec.kind); ++s) {
    const Mat S = spec.structure_values(x, s);
    frame.push_back(S * frame[0]);  // g-orthogonal to E_1 and unit by skewness
  }

  for (int c = 0; c < d && static_cast<int>(frame.size()) < d; ++c) {
    const int idx = perm ? (*perm)[static_cast<std::size_t>(c)] : c;
    Vec w = Vec::Zero(d);
    w[idx] = 1.0;
    for (const Vec& e : frame) w -= ip(w, e) * e;
    double r2 = ip(w, w);
    if (r2 < 1e-8 * 1e-8) continue;
    w /= std::sqrt(r2);
    // second pass for orthogonality at 1e-10 scale
    for (const Vec& e : frame) w -= ip(w, e) * e;
    r2 = ip(w, w);
    if (r2 < 1e-8 * 1e-8) continue;
    frame.push_back(w / std::sqrt(r2));
  }
  if (static_cast<int>(frame.size()) != d)
    throw NumericError("adapted_frame: Gram-Schmidt completion failed");

  Mat E(d, d);
  for (int i = 0; i < d; ++i) E.col(i) = frame[static_cast<std::size_t>(i)];
  return E;
}

Jet jet_ip(const std::vector<Jet>& gp, int d, const std::vector<Jet>& a,
           const std::vector<Jet>& b) {
  Jet s = gp[0] * a[0] * b[0];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == 0 && j == 0) continue;
      s += gp[static_cast<std::size_t>(pidx(d, i, j))] * a[static_cast<std::size_t>(i)] *
           b[static_cast<std::size_t>(j)];
    }
  return s;
}

std::vector<Jet> jet_solve_sym(const std::vector<Jet>& gp, int d, const std::vector<Jet>& b) {
  // One RHS column; delegate to the multi-column elimination below.
  std::vector<Jet> m(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      m[static_cast<std::size_t>(i) * d + j] = gp[static_cast<std::size_t>(pidx(d, i, j))];
  std::vector<Jet> rhs = b;
  std::vector<int> rows(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) rows[static_cast<std::size_t>(i)] = i;
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int r = c + 1; r < d; ++r)
      if (std::fabs(m[static_cast<std::size_t>(rows[static_cast<std::size_t>(r)]) * d + c].value()) >
          std::fabs(m[static_cast<std::size_t>(rows[static_cast<std::size_t>(piv)]) * d + c].value()))
        piv = r;
    std::swap(rows[static_cast<std::size_t>(c)], rows[static_cast<std::size_t>(piv)]);
    const int rc = rows[static_cast<std::size_t>(c)];
    const Jet& pivot = m[static_cast<std::size_t>(rc) * d + c];
    if (std::fabs(pivot.value()) < 1e-14)
      throw NumericError("jet_solve_sym: singular metric");
    for (int r = c + 1; r < d; ++r) {
      const int rr = rows[static_cast<std::size_t>(r)];
      Jet f = m[static_cast<std::size_t>(rr) * d + c] / pivot;
      for (int j = c + 1; j < d; ++j)
        m[static_cast<std::size_t>(rr) * d + j] -= f * m[static_cast<std::size_t>(rc) * d + j];
      rhs[static_cast<std::size_t>(rr)] -= f * rhs[static_cast<std::size_t>(rc)];
    }
  }
  std::vector<Jet> xsol(static_cast<std::size_t>(d));
  for (int c = d - 1; c >= 0; --c) {
    const int rc = rows[static_cast<std::size_t>(c)];
    Jet s = rhs[static_cast<std::size_t>(rc)];
    for (int j = c + 1; j < d; ++j)
      s -= m[static_cast<std::size_t>(rc) * d + j] * xsol[static_cast<std::size_t>(j)];
    xsol[static_cast<std::size_t>(c)] = s / m[static_cast<std::size_t>(rc) * d + c];
  }
  return xsol;
}

std::vector<Jet> jet_inverse_sym(const std::vector<Jet>& gp, int d) {
  const int dim = gp[0].dim();
  const int order = gp[0].order();
  std::vector<Jet> inv(static_cast<std::size_t>(d) * d);
  for (int c = 0; c < d; ++c) {
    std::vector<Jet> e(static_cast<std::size_t>(d), Jet::constant(0.0, dim, order));
    e[static_cast<std::size_t>(c)] = Jet::constant(1.0, dim, order);
    std::vector<Jet> col = jet_solve_sym(gp, d, e);
    for (int r = 0; r < d; ++r) inv[static_cast<std::size_t>(r) * d + c] = col[static_cast<std::size_t>(r)];
  }
  return inv;
}

std::vector<Jet> jet_matvec(const std::vector<Jet>& S, int d, const std::vector<Jet>& v) {
  std::vector<Jet> out(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Jet s = S[static_cast<std::size_t>(i) * d] * v[0];
    for (int j = 1; j < d; ++j) s += S[static_cast<std::size_t>(i) * d + j] * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

std::vector<std::vector<Jet>> jet_adapted_frame(const std::vector<Jet>& gp, int d,
                                                const std::vector<std::vector<Jet>>& seeds,
                                                const std::vector<int>* perm) {
  const int dim = gp[0].dim();
  const int order = gp[0].order();
  std::vector<std::vector<Jet>> frame;
  frame.reserve(static_cast<std::size_t>(d));
  auto push_normalized = [&](std::vector<Jet> w) -> bool {
    Jet n2 = jet_ip(gp, d, w, w);
    if (n2.value() < 1e-8 * 1e-8) return false;
    Jet inv = 1.0 / sqrt(n2);
    for (auto& c : w) c = c * inv;
    frame.push_back(std::move(w));
    return true;
  };
  for (const auto& s : seeds) {
    std::vector<Jet> w = s;
    for (const auto& e : frame) {
      Jet c = jet_ip(gp, d, w, e);
      for (int i = 0; i < d; ++i) w[static_cast<std::size_t>(i)] -= c * e[static_cast<std::size_t>(i)];
    }
    if (!push_normalized(std::move(w)))
      throw NumericError("jet_adapted_frame: dependent seed vectors");
  }
  for (int c = 0; c < d && static_cast<int>(frame.size()) < d; ++c) {
    const int cidx = perm ? (*perm)[static_cast<std::size_t>(c)] : c;
    std::vector<Jet> w(static_cast<std::size_t>(d), Jet::constant(0.0, dim, order));
    w[static_cast<std::size_t>(cidx)] = Jet::constant(1.0, dim, order);
    for (const auto& e : frame) {
      Jet c = jet_ip(gp, d, w, e);
      for (int i = 0; i < d; ++i) w[static_cast<std::size_t>(i)] -= c * e[static_cast<std::size_t>(i)];
    }
    push_normalized(std::move(w));
  }
  if (static_cast<int>(frame.size()) != d)
    throw NumericError("jet_adapted_frame: completion failed");
  return frame;
}

}  // namespace orthocurv
