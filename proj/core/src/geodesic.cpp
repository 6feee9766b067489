#include "orthocurv/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orthocurv/frames.hpp"

namespace orthocurv {

namespace {

struct GeoDeriv {
  Vec dx, dv;
  Mat dW;
  Mat dJ, dJp;
};

struct GeoState {
  Vec x, v;
  Mat W;       // transported columns (d x k)
  Mat J, Jp;   // (d-1) x (d-1) Jacobi blocks (frame components), optional

  GeoState scaled_add(const GeoDeriv& d, double s) const {
    GeoState o = *this;
    o.x += s * d.dx;
    o.v += s * d.dv;
    if (W.size()) o.W += s * d.dW;
    if (J.size()) {
      o.J += s * d.dJ;
      o.Jp += s * d.dJp;
    }
    return o;
  }
};

// One derivative evaluation. When jacobi is set, W must hold the transported
// E_2..E_d and the full curvature tensor is assembled at x.
GeoDeriv derivative(const ManifoldSpec& spec, const GeoState& s, bool jacobi) {
  const int d = spec.dim;
  GeoDeriv out;
  std::vector<double> gamma;
  const Curvature* curv = nullptr;
  Curvature cstore;
  if (jacobi) {
    cstore = curvature_at(spec, s.x.data());
    curv = &cstore;
  } else {
    Mat ginv;
    christoffel_at(spec, s.x.data(), ginv, gamma);
  }
  const auto chr = [&](int k, int i, int j) {
    return jacobi ? curv->chr(k, i, j) : gamma[static_cast<std::size_t>((k * d + i) * d + j)];
  };

  out.dx = s.v;
  out.dv = Vec::Zero(d);
  for (int k = 0; k < d; ++k) {
    double a = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a += chr(k, i, j) * s.v[i] * s.v[j];
    out.dv[k] = -a;
  }
  if (s.W.size()) {
    out.dW = Mat::Zero(d, s.W.cols());
    for (int c = 0; c < s.W.cols(); ++c)
      for (int k = 0; k < d; ++k) {
        double a = 0.0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) a += chr(k, i, j) * s.v[i] * s.W(j, c);
        out.dW(k, c) = -a;
      }
  }
  if (s.J.size()) {
    const int m = d - 1;
    Mat A(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        A(a, b) = A(b, a) = curv->r4(s.W.col(a), s.v, s.v, s.W.col(b));
      }
    out.dJ = s.Jp;
    out.dJp = -A * s.J;
  }
  return out;
}

GeoState rk4_step(const ManifoldSpec& spec, const GeoState& s, double h, bool jacobi) {
  GeoDeriv k1 = derivative(spec, s, jacobi);
  GeoDeriv k2 = derivative(spec, s.scaled_add(k1, 0.5 * h), jacobi);
  GeoDeriv k3 = derivative(spec, s.scaled_add(k2, 0.5 * h), jacobi);
  GeoDeriv k4 = derivative(spec, s.scaled_add(k3, h), jacobi);
  GeoState o = s;
  o.x += (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  o.v += (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  if (s.W.size()) o.W += (h / 6.0) * (k1.dW + 2.0 * k2.dW + 2.0 * k3.dW + k4.dW);
  if (s.J.size()) {
    o.J += (h / 6.0) * (k1.dJ + 2.0 * k2.dJ + 2.0 * k3.dJ + k4.dJ);
    o.Jp += (h / 6.0) * (k1.dJp + 2.0 * k2.dJp + 2.0 * k3.dJp + k4.dJp);
  }
  return o;
}

void check_domain(const ManifoldSpec& spec, const Vec& x) {
  if (spec.domain && spec.domain(x.data()) <= 0.0)
    throw NumericError("geodesic left the chart domain");
}

double speed_err(const ManifoldSpec& spec, const Vec& x, const Vec& v) {
  const Mat G = spec.metric_values(x.data());
  return std::fabs(v.dot(G * v) - 1.0);
}

GeodesicPath integrate_once(const ManifoldSpec& spec, const Vec& p, const Vec& v,
                            double length, double h) {
  const int n = std::max(2, 2 * static_cast<int>(std::ceil(length / (2.0 * h))));
  const double hs = length / n;
  GeodesicPath path;
  path.spec = &spec;
  path.h = hs;
  path.t.reserve(static_cast<std::size_t>(n + 1));
  path.x.reserve(static_cast<std::size_t>(n + 1));
  path.v.reserve(static_cast<std::size_t>(n + 1));
  GeoState s;
  s.x = p;
  s.v = v;
  path.t.push_back(0.0);
  path.x.push_back(p);
  path.v.push_back(v);
  double drift = 0.0;
  for (int i = 0; i < n; ++i) {
    s = rk4_step(spec, s, hs, false);
    check_domain(spec, s.x);
    drift = std::max(drift, speed_err(spec, s.x, s.v));
    path.t.push_back(hs * (i + 1));
    path.x.push_back(s.x);
    path.v.push_back(s.v);
  }
  path.speed_drift = drift;
  return path;
}

}  // namespace

GeodesicPath integrate_geodesic(const ManifoldSpec& spec, const Vec& p, const Vec& v,
                                double length, double h) {
  if (!(length > 0.0)) throw ConfigError("integrate_geodesic: length must be positive");
  const Mat G = spec.metric_values(p.data());
  if (std::fabs(v.dot(G * v) - 1.0) > 1e-9)
    throw NumericError("integrate_geodesic: v is not unit at p");
  check_domain(spec, p);
  double hs = h > 0.0 ? h : std::min(1e-3, length / 2000.0);
  for (;;) {
    GeodesicPath path = integrate_once(spec, p, v, length, hs);
    if (path.speed_drift < 1e-8) return path;
    hs *= 0.5;
    if (hs < 1e-8) throw NumericError("integrate_geodesic: step underflow");
  }
}

Vec exp_map(const ManifoldSpec& spec, const Vec& p, const Vec& v, double t) {
  return integrate_geodesic(spec, p, v, t).x.back();
}

std::vector<Mat> parallel_transport(const ManifoldSpec& spec, const GeodesicPath& path,
                                    const Mat& W0) {
  const Mat G0 = spec.metric_values(path.x.front().data());
  const Mat gram = W0.transpose() * G0 * W0;
  if ((gram - Mat::Identity(W0.cols(), W0.cols())).cwiseAbs().maxCoeff() > 1e-7)
    throw NumericError("parallel_transport: initial frame is not orthonormal");
  std::vector<Mat> frames;
  frames.reserve(path.t.size());
  GeoState s;
  s.x = path.x.front();
  s.v = path.v.front();
  s.W = W0;
  frames.push_back(W0);
  for (std::size_t i = 0; i + 1 < path.t.size(); ++i) {
    // restart each interval from the stored, higher-accuracy path state
    s.x = path.x[i];
    s.v = path.v[i];
    s = rk4_step(spec, s, path.t[i + 1] - path.t[i], false);
    frames.push_back(s.W);
  }
  return frames;
}

namespace {

// Coarse path scan: integrate ~96 fixed RK4 steps, track the closest
// approach to q in the g(q)-norm. Domain exits truncate the scan.
struct Approach {
  double t = 0.0;
  double dist = std::numeric_limits<double>::infinity();
};

Approach closest_approach(const ManifoldSpec& spec, const Vec& p, const Vec& v,
                          double tmax, const Vec& q, const Mat& Gq, int nsteps) {
  const double h = tmax / nsteps;
  GeoState s;
  s.x = p;
  s.v = v;
  Approach best;
  for (int i = 0; i < nsteps; ++i) {
    GeoState nxt;
    try {
      nxt = rk4_step(spec, s, h, false);
    } catch (const NumericError&) {
      break;
    }
    if (spec.domain && spec.domain(nxt.x.data()) <= 0.0) break;
    s = nxt;
    const Vec dxq = s.x - q;
    const double dd = std::sqrt(std::max(0.0, dxq.dot(Gq * dxq)));
    if (dd < best.dist) {
      best.dist = dd;
      best.t = h * (i + 1);
    }
  }
  return best;
}

Vec g_normalize(const Mat& G, const Vec& u) {
  const double n = std::sqrt(std::max(1e-300, u.dot(G * u)));
  return u / n;
}

struct Seed {
  Vec dir;
  double t = 0.0;
  double approach = std::numeric_limits<double>::infinity();
};

// Newton refinement on (direction chart, length).
ShootResult refine(const ManifoldSpec& spec, const Vec& p, const Vec& q, const Mat& Gp,
                   const Mat& Gq, const Seed& seed) {
  const int d = spec.dim;
  ShootResult res;
  // chart basis orthogonal (Euclidean) to the seed direction
  Mat B(d, d - 1);
  {
    Mat basis = Mat::Identity(d, d);
    int col = 0;
    Vec u0 = seed.dir.normalized();
    for (int c = 0; c < d && col < d - 1; ++c) {
      Vec w = basis.col(c) - basis.col(c).dot(u0) * u0;
      for (int j = 0; j < col; ++j) w -= w.dot(B.col(j)) * B.col(j);
      if (w.norm() < 1e-8) continue;
      B.col(col++) = w.normalized();
    }
    if (col != d - 1) throw NumericError("shooting: direction chart failed");
  }
  Vec u = Vec::Zero(d);  // (a_1..a_{d-1}, T)
  u[d - 1] = seed.t;

  auto endpoint = [&](const Vec& uu) -> Vec {
    Vec dir = seed.dir;
    for (int j = 0; j < d - 1; ++j) dir += uu[j] * B.col(j);
    dir = g_normalize(Gp, dir);
    const double T = uu[d - 1];
    if (!(T > 1e-12)) throw NumericError("shooting: nonpositive length");
    const double h = std::min(1e-3, T / 2000.0);
    const int n = std::max(2, static_cast<int>(std::ceil(T / h)));
    const double hs = T / n;
    GeoState s;
    s.x = p;
    s.v = dir;
    for (int i = 0; i < n; ++i) s = rk4_step(spec, s, hs, false);
    return s.x;
  };

  double fnorm = std::numeric_limits<double>::infinity();
  Vec F;
  try {
    F = endpoint(u) - q;
  } catch (const NumericError&) {
    return res;
  }
  fnorm = std::sqrt(std::max(0.0, F.dot(Gq * F)));
  for (int iter = 0; iter < 14 && fnorm > 0.5e-7 * std::max(u[d - 1], 1e-6); ++iter) {
    Mat Jac(d, d);
    const double eps = 1e-6;
    bool ok = true;
    for (int c = 0; c < d; ++c) {
      Vec up = u;
      up[c] += eps;
      try {
        Jac.col(c) = (endpoint(up) - q - F) / eps;
      } catch (const NumericError&) {
        ok = false;
        break;
      }
    }
    if (!ok) break;
    const Vec du = Jac.colPivHouseholderQr().solve(-F);
    double lam = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 6; ++ls) {
      try {
        const Vec ut = u + lam * du;
        const Vec Ft = endpoint(ut) - q;
        const double fn = std::sqrt(std::max(0.0, Ft.dot(Gq * Ft)));
        if (fn < fnorm) {
          u = ut;
          F = Ft;
          fnorm = fn;
          improved = true;
          break;
        }
      } catch (const NumericError&) {
      }
      lam *= 0.5;
    }
    if (!improved) break;
  }

  Vec dir = seed.dir;
  for (int j = 0; j < d - 1; ++j) dir += u[j] * B.col(j);
  dir = g_normalize(Gp, dir);
  const double T = u[d - 1];
  if (!(T > 1e-12)) return res;
  try {
    res.path = integrate_geodesic(spec, p, dir, T);
  } catch (const NumericError&) {
    return res;
  }
  const Vec Fq = res.path.x.back() - q;
  res.residual = std::sqrt(std::max(0.0, Fq.dot(Gq * Fq)));
  res.path.endpoint_error = res.residual;
  res.distance = T;
  res.direction = dir;
  res.converged = res.residual < 1e-7 * T;
  return res;
}

}  // namespace

ShootResult shoot_distance(const ManifoldSpec& spec, const Vec& p, const Vec& q) {
  const int d = spec.dim;
  const Mat Gp = spec.metric_values(p.data());
  const Mat Gq = spec.metric_values(q.data());
  const Vec diff = q - p;
  const double chord = std::sqrt(std::max(0.0, diff.dot(Gp * diff)));
  if (chord < 1e-12) throw ConfigError("distance: p and q coincide");
  const double hint = spec.anchors.inj_hint;
  const double tmax = std::isfinite(hint) ? 0.995 * hint : 2.2 * chord;

  const int n0 = 64 * (d - 1);
  Rng rng(0xA5CE17u);
  std::vector<Seed> seeds(static_cast<std::size_t>(n0));
  for (int i = 0; i < n0; ++i) {
    Rng r = rng.fork(static_cast<std::uint64_t>(i));
    Vec u(d);
    for (int j = 0; j < d; ++j) u[j] = r.gaussian();
    Seed& s = seeds[static_cast<std::size_t>(i)];
    s.dir = g_normalize(Gp, u);
    const Approach a = closest_approach(spec, p, s.dir, tmax, q, Gq, 96);
    s.t = a.t;
    s.approach = a.dist;
  }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.approach < b.approach; });

  // Refine the best few well-separated seeds; tie-break converged results by
  // shorter length, then lexicographic initial direction.
  ShootResult best;
  int refined = 0;
  for (std::size_t i = 0; i < seeds.size() && refined < 3; ++i) {
    bool close = false;
    for (std::size_t j = 0; j < i && !close; ++j)
      close = (seeds[i].dir - seeds[j].dir).norm() < 0.2 &&
              seeds[j].approach < std::numeric_limits<double>::infinity();
    if (close && refined > 0) continue;
    if (!(seeds[i].t > 0.0)) continue;
    ++refined;
    ShootResult r = refine(spec, p, q, Gp, Gq, seeds[i]);
    const bool better =
        (r.converged && !best.converged) ||
        (r.converged == best.converged &&
         (r.converged
              ? (r.distance < best.distance - 1e-12 ||
                 (std::fabs(r.distance - best.distance) <= 1e-12 &&
                  std::lexicographical_compare(r.direction.data(), r.direction.data() + d,
                                               best.direction.data(), best.direction.data() + d)))
              : r.residual < best.residual));
    if (best.direction.size() == 0 || better) best = r;
  }
  return best;
}

ShootResult distance(const ManifoldSpec& spec, const Vec& p, const Vec& q) {
  ShootResult r = shoot_distance(spec, p, q);
  if (!r.converged)
    throw NumericError("distance: shooting did not converge (best residual " +
                       float17(r.residual) + ")");
  const double hint = spec.anchors.inj_hint;
  if (std::isfinite(hint) && r.distance > hint * (1.0 + 1e-9))
    throw ConfigError("distance: target beyond injectivity-radius hint");
  return r;
}

// ---- radial machinery ----

int RadialTable::index_at(double r) const {
  if (t.size() < 2) throw NumericError("radial table is empty");
  const double h = t[1] - t[0];
  int i = static_cast<int>(std::llround(r / h));
  i = std::max(1, std::min(static_cast<int>(t.size()) - 1, i));
  return i;
}

RadialTable radial_table(const ManifoldSpec& spec, const Vec& base, const Vec& v,
                         double rmax, double h) {
  const int d = spec.dim;
  const Mat G = spec.metric_values(base.data());
  if (std::fabs(v.dot(G * v) - 1.0) > 1e-9)
    throw NumericError("radial_table: v is not unit");
  const double hs0 = h > 0.0 ? h : std::min(1e-3, rmax / 2000.0);
  const int n = std::max(2, static_cast<int>(std::ceil(rmax / hs0)));
  const double hs = rmax / n;
  const int m = d - 1;
  const int ns = structure_count(spec.kind);

  // frame at base: E_1 = v, then structure images, then completion
  const Mat E = adapted_frame(spec, G, base.data(), v);

  GeoState s;
  s.x = base;
  s.v = E.col(0);
  s.W = E.rightCols(m);
  s.J = Mat::Zero(m, m);
  s.Jp = Mat::Identity(m, m);

  RadialTable tab;
  tab.t.reserve(static_cast<std::size_t>(n + 1));
  auto push = [&](double tcur) {
    tab.t.push_back(tcur);
    tab.x.push_back(s.x);
    tab.grad.push_back(s.v);
    Mat F(d, d);
    F.col(0) = s.v;
    F.rightCols(m) = s.W;
    tab.frame.push_back(F);
    if (tcur <= 0.0) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      tab.laplacian.push_back(nan);
      tab.orthogonal.push_back(nan);
      tab.d_orthogonal.push_back(nan);
      tab.hess_frame.push_back(Mat::Zero(m, m));
      return;
    }
    const Mat S = s.Jp * s.J.inverse();
    const Mat Ssym = 0.5 * (S + S.transpose());
    tab.hess_frame.push_back(Ssym);
    double tr = Ssym.trace(), trs = 0.0;
    for (int a = 0; a < ns; ++a) trs += Ssym(a, a);
    tab.laplacian.push_back(tr);
    tab.orthogonal.push_back(tr - trs);
    // d/dr tr_perp S = -tr_perp(S^2 + A), A from the current curvature
    const Curvature c = curvature_at(spec, s.x.data());
    Mat A(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) A(a, b) = A(b, a) = c.r4(s.W.col(a), s.v, s.v, s.W.col(b));
    const Mat SS = Ssym * Ssym + A;
    double dperp = 0.0;
    for (int a = ns; a < m; ++a) dperp -= SS(a, a);
    tab.d_orthogonal.push_back(dperp);
  };

  push(0.0);
  for (int i = 0; i < n; ++i) {
    s = rk4_step(spec, s, hs, true);
    check_domain(spec, s.x);
    push(hs * (i + 1));
  }
  return tab;
}

Mat radial_hessian_coords(const RadialTable& tab, int i) {
  const Vec& x = tab.x[static_cast<std::size_t>(i)];
  const Mat& F = tab.frame[static_cast<std::size_t>(i)];
  const Mat& S = tab.hess_frame[static_cast<std::size_t>(i)];
  const int d = F.rows();
  const int m = d - 1;
  // Hess r = sum_{a,b} S_ab (G E_{a+1}) (G E_{b+1})^T in chart components;
  // the metric comes from the owning spec via the frame's base point -- the
  // caller holds the spec, so rebuild G from the stored frame instead:
  // G = (F F^T)^{-1} since F is g-orthonormal (F^T G F = Id).
  (void)x;
  const Mat G = (F * F.transpose()).inverse();
  Mat H = Mat::Zero(d, d);
  for (int a = 0; a < m; ++a) {
    const Vec ea = G * F.col(a + 1);
    for (int b = 0; b < m; ++b) {
      const Vec eb = G * F.col(b + 1);
      H += S(a, b) * ea * eb.transpose();
    }
  }
  return 0.5 * (H + H.transpose());
}

RadialDerivatives radial_derivatives(const ManifoldSpec& spec, const Vec& base, const Vec& x,
                                     const std::vector<dsl::Expression>* Z) {
  ShootResult sr = distance(spec, base, x);
  const double hint = spec.anchors.inj_hint;
  if (std::isfinite(hint) && sr.distance > 0.95 * hint)
    throw ConfigError("radial_derivatives: point too close to the cut locus");
  RadialTable tab = radial_table(spec, base, sr.direction, sr.distance);
  const int i = static_cast<int>(tab.t.size()) - 1;
  RadialDerivatives out;
  out.r = sr.distance;
  out.grad_r = tab.grad[static_cast<std::size_t>(i)];
  out.hess_r = radial_hessian_coords(tab, i);
  out.laplacian_r = tab.laplacian[static_cast<std::size_t>(i)];
  out.orthogonal_laplacian_r = tab.orthogonal[static_cast<std::size_t>(i)];
  out.d_orthogonal_dr = tab.d_orthogonal[static_cast<std::size_t>(i)];
  out.drift = out.laplacian_r;
  if (Z) {
    const int d = spec.dim;
    if (static_cast<int>(Z->size()) != d) throw ConfigError("Z needs d components");
    const Mat G = spec.metric_values(x.data());
    Vec zv(d);
    for (int k = 0; k < d; ++k) zv[k] = (*Z)[static_cast<std::size_t>(k)].eval_value(x.data(), d);
    out.drift += zv.dot(G * out.grad_r);
  }
  return out;
}

Mat radial_hessian_stencil(const ManifoldSpec& spec, const Vec& base, const Vec& x,
                           double h_r) {
  const int d = spec.dim;
  auto dist = [&](const Vec& y) {
    if (spec.closed_distance) return spec.closed_distance(base, y);
    return distance(spec, base, y).distance;
  };
  auto hess_at = [&](double h) {
    const double r0 = dist(x);
    Vec dr(d);
    Mat h2(d, d);
    for (int i = 0; i < d; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double rp = dist(xp), rm = dist(xm);
      dr[i] = (rp - rm) / (2.0 * h);
      h2(i, i) = (rp - 2.0 * r0 + rm) / (h * h);
    }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        Vec a = x, b = x, c = x, e = x;
        a[i] += h;
        a[j] += h;
        b[i] += h;
        b[j] -= h;
        c[i] -= h;
        c[j] += h;
        e[i] -= h;
        e[j] -= h;
        h2(i, j) = h2(j, i) = (dist(a) - dist(b) - dist(c) + dist(e)) / (4.0 * h * h);
      }
    Mat ginv;
    std::vector<double> gamma;
    christoffel_at(spec, x.data(), ginv, gamma);
    Mat H(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double v = h2(i, j);
        for (int k = 0; k < d; ++k)
          v -= gamma[static_cast<std::size_t>((k * d + i) * d + j)] * dr[k];
        H(i, j) = v;
      }
    return H;
  };
  const Mat H1 = hess_at(h_r);
  const Mat H2 = hess_at(0.5 * h_r);
  return (4.0 * H2 - H1) / 3.0;  // Richardson: kills the O(h^2) term
}

// ---- index forms ----

Profile Profile::sin_pi(double l) {
  Profile p;
  const double w = std::numbers::pi / l;
  p.f = [w](double t) { return std::sin(w * t); };
  p.fp = [w](double t) { return w * std::cos(w * t); };
  p.fpp = [w](double t) { return -w * w * std::sin(w * t); };
  p.name = "sin-pi";
  return p;
}

Profile Profile::constant_one() {
  Profile p;
  p.f = [](double) { return 1.0; };
  p.fp = [](double) { return 0.0; };
  p.fpp = [](double) { return 0.0; };
  p.name = "literal-j";
  return p;
}

IndexFormReport index_form(const ManifoldSpec& spec, const GeodesicPath& path,
                           const std::vector<Mat>& frames, const Profile& profile,
                           const std::vector<int>& frame_indices,
                           bool allow_nonzero_boundary) {
  const std::size_t nsamp = path.t.size();
  if (frames.size() != nsamp) throw ConfigError("index_form: frame/path sample mismatch");
  const double l = path.length();
  const bool boundary_ok =
      std::fabs(profile.f(0.0)) <= 1e-9 && std::fabs(profile.f(l)) <= 1e-9;
  if (!boundary_ok && !allow_nonzero_boundary)
    throw ConfigError("index_form: profile violates f(0) = f(l) = 0");
  const int nseg = static_cast<int>(nsamp) - 1;
  if (nseg < 2 || nseg % 2 != 0) throw ConfigError("index_form: need an even sample grid");

  IndexFormReport rep;
  std::vector<std::vector<double>> integrand(frame_indices.size(),
                                             std::vector<double>(nsamp, 0.0));
  for (std::size_t s = 0; s < nsamp; ++s) {
    const Curvature c = curvature_at(spec, path.x[s].data());
    const double ft = profile.f(path.t[s]);
    const double fpt = profile.fp(path.t[s]);
    for (std::size_t k = 0; k < frame_indices.size(); ++k) {
      const int idx = frame_indices[k] - 1;  // 1-based E_i
      if (idx < 0 || idx >= frames[s].cols())
        throw ConfigError("index_form: frame index out of range");
      const Vec e = frames[s].col(idx);
      integrand[k][s] = fpt * fpt * c.ip(e, e) - ft * ft * c.r4(e, path.v[s], path.v[s], e);
    }
  }
  const double h = path.h;
  for (std::size_t k = 0; k < frame_indices.size(); ++k) {
    double acc = integrand[k][0] + integrand[k][static_cast<std::size_t>(nseg)];
    for (int s = 1; s < nseg; ++s)
      acc += integrand[k][static_cast<std::size_t>(s)] * (s % 2 ? 4.0 : 2.0);
    IndexFormValue v;
    v.frame_index = frame_indices[k];
    v.value = acc * h / 3.0;
    v.boundary_ok = boundary_ok;
    rep.per_index.push_back(v);
    rep.aggregate += v.value;
  }
  return rep;
}

}  // namespace orthocurv
