#include "orthocurv/lemmas.hpp"

#include <cmath>

#include "orthocurv/curvature.hpp"
#include "orthocurv/util.hpp"

namespace orthocurv {

namespace {

// Composite Simpson over the path's uniform grid (even segment count is a
// GeodesicPath invariant).
double simpson_samples(const std::vector<double>& y, double h) {
  const std::size_t n = y.size() - 1;
  if (n < 2 || n % 2 != 0) throw ConfigError("simpson_samples: need an even segment count");
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < n; i += 2) odd += y[i];
  for (std::size_t i = 2; i < n; i += 2) even += y[i];
  return h / 3.0 * (y[0] + 4.0 * odd + 2.0 * even + y[n]);
}

void require_boundary(const Profile& profile, double l) {
  if (std::abs(profile.f(0.0)) > 1e-9 || std::abs(profile.f(l)) > 1e-9)
    throw ConfigError("lemma check: profile must vanish at both endpoints");
}

}  // namespace

LemmaCheck gradient_lemma_check(const ManifoldSpec& spec, const dsl::Expression& phi,
                                const GeodesicPath& path, const Profile& profile, double C) {
  const double l = path.length();
  require_boundary(profile, l);
  const std::size_t nsamp = path.t.size();
  const double h = path.t[1] - path.t[0];

  std::vector<double> y_lhs(nsamp), y_rhs(nsamp), y_id(nsamp);
  LemmaCheck out;
  for (std::size_t s = 0; s < nsamp; ++s) {
    const double t = path.t[s];
    const double f = profile.f(t), fp = profile.fp(t), fpp = profile.fpp(t);
    const double ffp_prime = fp * fp + f * fpp;  // (f f')'
    const Mat H = hessian(spec, phi, path.x[s].data());
    const double phi_val = phi.eval_value(path.x[s].data(), spec.dim);
    y_lhs[s] = f * f * path.v[s].dot(H * path.v[s]);
    y_rhs[s] = ffp_prime * ffp_prime;
    y_id[s] = ffp_prime * phi_val;
    out.c_measured = std::max(out.c_measured, std::abs(phi_val));
  }
  out.c_used = C >= 0.0 ? C : out.c_measured;
  out.lhs = simpson_samples(y_lhs, h);
  out.rhs = 2.0 * out.c_used * std::sqrt(l) * std::sqrt(simpson_samples(y_rhs, h));
  out.rhs_printed = out.rhs;  // printed constant is already the provable one
  out.identity_rhs = 2.0 * simpson_samples(y_id, h);
  out.holds = out.lhs <= out.rhs + 1e-8;
  out.holds_printed = out.lhs <= out.rhs_printed + 1e-8;
  return out;
}

LemmaCheck lie_lemma_check(const ManifoldSpec& spec, const std::vector<dsl::Expression>& V,
                           const GeodesicPath& path, const Profile& profile, double C) {
  const double l = path.length();
  require_boundary(profile, l);
  if (static_cast<int>(V.size()) != spec.dim)
    throw ConfigError("lie_lemma_check: field component count != dim");
  const std::size_t nsamp = path.t.size();
  const double h = path.t[1] - path.t[0];

  std::vector<double> y_lhs(nsamp), y_rhs(nsamp), y_id(nsamp);
  LemmaCheck out;
  for (std::size_t s = 0; s < nsamp; ++s) {
    const double t = path.t[s];
    const double f = profile.f(t), fp = profile.fp(t);
    const Mat L = lie_derivative_metric(spec, V, path.x[s].data());
    const Mat g = spec.metric_values(path.x[s].data());
    Vec vfield(spec.dim);
    for (int i = 0; i < spec.dim; ++i) vfield[i] = V[i].eval_value(path.x[s].data(), spec.dim);
    y_lhs[s] = f * f * path.v[s].dot(L * path.v[s]);
    y_rhs[s] = f * f * fp * fp;
    y_id[s] = f * fp * path.v[s].dot(g * vfield);
    out.c_measured = std::max(out.c_measured, std::sqrt(vfield.dot(g * vfield)));
  }
  out.c_used = C >= 0.0 ? C : out.c_measured;
  const double quad = std::sqrt(simpson_samples(y_rhs, h));
  out.lhs = simpson_samples(y_lhs, h);
  out.rhs = 4.0 * out.c_used * std::sqrt(l) * quad;
  out.rhs_printed = out.c_used * std::sqrt(l) * quad;
  out.identity_rhs = -4.0 * simpson_samples(y_id, h);
  out.holds = out.lhs <= out.rhs + 1e-8;
  out.holds_printed = out.lhs <= out.rhs_printed + 1e-8;
  return out;
}

}  // namespace orthocurv
