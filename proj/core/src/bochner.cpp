#include "orthocurv/bochner.hpp"

#include <cmath>
#include <limits>

#include "orthocurv/curvature.hpp"
#include "orthocurv/frames.hpp"
#include "orthocurv/util.hpp"

namespace orthocurv {

namespace {

inline int pidx(int d, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}

std::vector<Jet> truncate_all(const std::vector<Jet>& v, int order) {
  std::vector<Jet> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].truncated(order);
  return out;
}

// Christoffels as order-(gp order - 1) jets.
std::vector<Jet> jet_christoffel(const std::vector<Jet>& gp, int d) {
  const int ord = gp[0].order() - 1;
  const std::vector<Jet> ginv = truncate_all(jet_inverse_sym(gp, d), ord);
  std::vector<Jet> gamma(static_cast<std::size_t>(d) * d * d);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      std::vector<Jet> lower(static_cast<std::size_t>(d));  // (1/2)(dg_acb + dg_bca - dg_cab)
      for (int c = 0; c < d; ++c)
        lower[static_cast<std::size_t>(c)] =
            0.5 * (gp[static_cast<std::size_t>(pidx(d, c, b))].partial(a) +
                   gp[static_cast<std::size_t>(pidx(d, c, a))].partial(b) -
                   gp[static_cast<std::size_t>(pidx(d, a, b))].partial(c));
      for (int k = 0; k < d; ++k) {
        Jet s = ginv[static_cast<std::size_t>(k) * d] * lower[0];
        for (int c = 1; c < d; ++c)
          s += ginv[static_cast<std::size_t>(k) * d + c] * lower[static_cast<std::size_t>(c)];
        gamma[static_cast<std::size_t>((k * d + a) * d + b)] = s;
        gamma[static_cast<std::size_t>((k * d + b) * d + a)] = s;
      }
    }
  return gamma;
}

// Shared field construction: gradient field u (order 2), |grad f|^2 (order
// 2), and the lap_perp f field (order 1).
struct FieldCtx {
  int d = 0, ns = 0;
  std::vector<Jet> gp;      // packed metric, order 2
  Jet fj;                   // f, order 3
  std::vector<Jet> df;      // order 2
  std::vector<Jet> u;       // gradient field, order 2
  Jet h;                    // |grad f|^2, order 2
  Jet lap_perp;             // order 1
};

FieldCtx build_fields(const ManifoldSpec& spec, const dsl::Expression& f, const double* x) {
  FieldCtx ctx;
  const int d = ctx.d = spec.dim;
  ctx.ns = structure_count(spec.kind);
  ctx.gp = spec.metric_jets(x, 2);
  ctx.fj = f.eval(x, d, 3);
  ctx.df.resize(static_cast<std::size_t>(d));
  for (int b = 0; b < d; ++b) ctx.df[static_cast<std::size_t>(b)] = ctx.fj.partial(b);
  ctx.u = jet_solve_sym(ctx.gp, d, ctx.df);
  ctx.h = ctx.u[0] * ctx.df[0];
  for (int a = 1; a < d; ++a) ctx.h += ctx.u[static_cast<std::size_t>(a)] * ctx.df[static_cast<std::size_t>(a)];

  // order-1 building blocks for lap_perp f
  const std::vector<Jet> gp1 = truncate_all(ctx.gp, 2);  // keep order 2 for christoffel input
  const std::vector<Jet> gamma = jet_christoffel(gp1, d);  // order 1
  std::vector<Jet> hess(static_cast<std::size_t>(d) * d);  // Hess f_{ab}, order 1
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      Jet s = ctx.fj.partial(a).partial(b);
      for (int k = 0; k < d; ++k)
        s -= gamma[static_cast<std::size_t>((k * d + a) * d + b)] *
             ctx.df[static_cast<std::size_t>(k)].truncated(1);
      hess[static_cast<std::size_t>(a) * d + b] = s;
      hess[static_cast<std::size_t>(b) * d + a] = s;
    }
  auto hess_quad = [&](const std::vector<Jet>& X) {  // Hess f(X, X), order 1
    Jet s = Jet::constant(0.0, d, 1);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        s += X[static_cast<std::size_t>(a)].truncated(1) * X[static_cast<std::size_t>(b)].truncated(1) *
             hess[static_cast<std::size_t>(a) * d + b];
    return s;
  };
  const std::vector<Jet> ginv1 = truncate_all(jet_inverse_sym(ctx.gp, d), 1);
  Jet lap = Jet::constant(0.0, d, 1);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      lap += ginv1[static_cast<std::size_t>(a) * d + b] * hess[static_cast<std::size_t>(a) * d + b];

  // subtract the structure-span block: Hess(u,u)/h and each structure image
  const std::vector<Jet> gp_1 = truncate_all(ctx.gp, 1);
  Jet lap_span = hess_quad(ctx.u) / ctx.h.truncated(1);
  for (int s = 0; s < ctx.ns; ++s) {
    const std::vector<Jet> S = spec.structure_jets(x, s, 1);
    std::vector<Jet> su = jet_matvec(S, d, truncate_all(ctx.u, 1));
    lap_span += hess_quad(su) / jet_ip(gp_1, d, su, su);
  }
  ctx.lap_perp = lap - lap_span;
  return ctx;
}

// (nabla_X Y)^k at the base point from a jet field Y and plain X, with
// value-level Christoffels.
Vec covariant(const std::vector<double>& gamma, int d, const Vec& X,
              const std::vector<Jet>& Y) {
  Vec out = Vec::Zero(d);
  for (int k = 0; k < d; ++k) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      s += X[a] * Y[static_cast<std::size_t>(k)].grad(a);
      for (int b = 0; b < d; ++b)
        s += gamma[static_cast<std::size_t>((k * d + a) * d + b)] * X[a] *
             Y[static_cast<std::size_t>(b)].value();
    }
    out[k] = s;
  }
  return out;
}

Vec values_of(const std::vector<Jet>& v) {
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i].value();
  return out;
}

}  // namespace

double lap_perp_field_value(const ManifoldSpec& spec, const dsl::Expression& f,
                            const double* x) {
  return build_fields(spec, f, x).lap_perp.value();
}

BochnerTerms bochner_terms(const ManifoldSpec& spec, const dsl::Expression& f, const double* x,
                           const std::vector<int>* perm) {
  const int d = spec.dim;
  FieldCtx ctx = build_fields(spec, f, x);
  BochnerTerms out;
  out.grad_norm = std::sqrt(std::max(0.0, ctx.h.value()));
  if (std::abs(out.grad_norm - 1.0) > 1e-8)
    throw NumericError("bochner_terms: |grad f| must be 1 at the sample point");

  // jet frame field: E_1 = u/|u|, structure images, chart completion
  Jet inv_norm = 1.0 / sqrt(ctx.h);
  std::vector<Jet> e1(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) e1[static_cast<std::size_t>(i)] = ctx.u[static_cast<std::size_t>(i)] * inv_norm;
  std::vector<std::vector<Jet>> seeds;
  seeds.push_back(e1);
  for (int s = 0; s < ctx.ns; ++s)
    seeds.push_back(jet_matvec(spec.structure_jets(x, s, 2), d, e1));
  const auto frame = jet_adapted_frame(ctx.gp, d, seeds, perm);

  const int i_first = ctx.ns + 1;  // 0-based index of the first perp direction
  out.vacuous = i_first >= d;

  const Mat G = spec.metric_values(x);
  Mat ginv_v;
  std::vector<double> gamma_v;
  christoffel_at(spec, x, ginv_v, gamma_v);
  const Curvature curv = curvature_at(spec, x);
  const Vec uv = values_of(ctx.u);
  const Vec acc = covariant(gamma_v, d, uv, ctx.u);  // nabla_{grad f} grad f

  auto gdot = [&](const Vec& a, const Vec& b) { return a.dot(G * b); };

  for (int i = i_first; i < d; ++i) {
    const std::vector<Jet>& Ei = frame[static_cast<std::size_t>(i)];
    const Vec ev = values_of(Ei);

    // (1/2) E_i E_i |grad f|^2: w = E_i(h) as an order-1 jet, then E_i(w)
    Jet w = Ei[0].truncated(1) * ctx.h.partial(0);
    for (int a = 1; a < d; ++a) w += Ei[static_cast<std::size_t>(a)].truncated(1) * ctx.h.partial(a);
    double eeh = 0.0;
    for (int b = 0; b < d; ++b) eeh += ev[b] * w.grad(b);
    out.lhs_frame += 0.5 * eeh;

    out.ric_perp += curv.r4(ev, uv, uv, ev);

    const Vec dEiEi = covariant(gamma_v, d, ev, Ei);
    const Vec dEiU = covariant(gamma_v, d, ev, ctx.u);
    const Vec dUEi = covariant(gamma_v, d, uv, Ei);
    out.t4 += gdot(acc, dEiEi);
    out.t5_norm += gdot(dEiU, dEiU);
    out.t5_cross += gdot(dUEi, dEiU);
  }

  // T3 = g(grad f, grad lap_perp f) = u^c d_c(lap_perp f)
  for (int c = 0; c < d; ++c) out.grad_lap_term += uv[c] * ctx.lap_perp.grad(c);

  out.lhs_lap_perp = out.lhs_frame - out.t4;
  const double rhs = out.ric_perp + out.grad_lap_term + out.t4 + out.t5_norm - 2.0 * out.t5_cross;
  out.residual = out.lhs_frame - rhs;
  out.residual_printed = spec.kind == StructureKind::Quaternionic
                             ? out.residual - out.t4 - out.t5_cross
                             : out.residual;
  return out;
}

RadialBochnerSample radial_bochner(const ManifoldSpec& spec, const RadialTable& tab, int index) {
  const int d = spec.dim;
  const int m = d - 1;
  const int ns = structure_count(spec.kind);
  if (index < 1 || index >= static_cast<int>(tab.t.size()))
    throw ConfigError("radial_bochner: index outside the table (t = 0 row is singular)");

  RadialBochnerSample out;
  out.r = tab.t[static_cast<std::size_t>(index)];
  out.d_lap_perp = tab.d_orthogonal[static_cast<std::size_t>(index)];
  out.lap_perp = tab.orthogonal[static_cast<std::size_t>(index)];

  const Vec& x = tab.x[static_cast<std::size_t>(index)];
  const Mat G = spec.metric_values(x.data());
  Vec v = tab.grad[static_cast<std::size_t>(index)];
  v /= std::sqrt(v.dot(G * v));  // re-unitize against integrator drift
  const Curvature curv = curvature_at(spec, x.data());
  const RicPerp rp = orthogonal_ricci(spec, curv, v);
  out.ric_perp = rp.via_decomposition;

  const Mat& S = tab.hess_frame[static_cast<std::size_t>(index)];
  for (int a = ns; a < m; ++a)
    for (int b = 0; b < m; ++b) out.s_norm2 += S(b, a) * S(b, a);

  out.residual = out.ric_perp + out.d_lap_perp + out.s_norm2;
  const int dperp = m - ns;
  out.modified_margin =
      dperp > 0 ? -(out.ric_perp + out.d_lap_perp + out.lap_perp * out.lap_perp / dperp)
                : std::numeric_limits<double>::quiet_NaN();

  // Hypothesis-term sensitivity: -2 sum Hess r(nabla_{gdot} E_i, E_i) for the
  // parallel frame (zero by construction) and for the pointwise
  // coordinate-Gram-Schmidt frame (finite differences along the path).
  out.cross_term_parallel = 0.0;
  if (index + 1 < static_cast<int>(tab.t.size())) {
    const int ia = index - 1, ib = index + 1;
    const double dt = tab.t[static_cast<std::size_t>(ib)] - tab.t[static_cast<std::size_t>(ia)];
    const Mat Fa = adapted_frame(spec, spec.metric_values(tab.x[static_cast<std::size_t>(ia)].data()),
                                 tab.x[static_cast<std::size_t>(ia)].data(),
                                 tab.grad[static_cast<std::size_t>(ia)]);
    const Mat Fb = adapted_frame(spec, spec.metric_values(tab.x[static_cast<std::size_t>(ib)].data()),
                                 tab.x[static_cast<std::size_t>(ib)].data(),
                                 tab.grad[static_cast<std::size_t>(ib)]);
    const Mat Fc = adapted_frame(spec, G, x.data(), tab.grad[static_cast<std::size_t>(index)]);
    Mat ginv_v;
    std::vector<double> gamma_v;
    christoffel_at(spec, x.data(), ginv_v, gamma_v);
    const Mat H = radial_hessian_coords(tab, index);  // Hess r, chart components
    double cross = 0.0;
    for (int i = ns + 1; i < d; ++i) {
      Vec dE = (Fb.col(i) - Fa.col(i)) / dt;  // d/dt of the frame column
      for (int k = 0; k < d; ++k)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            dE[k] += gamma_v[static_cast<std::size_t>((k * d + a) * d + b)] * v[a] * Fc(b, i);
      cross += dE.dot(H * Fc.col(i));
    }
    out.cross_term_coordinate = -2.0 * cross;
  }
  return out;
}

}  // namespace orthocurv
