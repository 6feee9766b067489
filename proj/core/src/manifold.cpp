#include "orthocurv/manifold.hpp"

#include <cmath>
#include <numbers>

namespace orthocurv {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------- constant structure endomorphisms ----------

// Interleaved complex structure: z_i = x_{2i-1} + i x_{2i} (1-based), so
// J e_{2i-1} = e_{2i}, J e_{2i} = -e_{2i-1}.
void standard_complex_structure(int d, std::vector<double>& m) {
  m.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i + 1 < d; i += 2) {
    m[static_cast<std::size_t>(i + 1) * d + i] = 1.0;   // (J X)^{2i+1} = X^{2i}
    m[static_cast<std::size_t>(i) * d + (i + 1)] = -1.0;
  }
}

// Quaternionic structures on H^n blocks q = (w,x,y,z). Two conventions, both
// satisfying I^2 = J^2 = K^2 = IJK = -Id:
//   left:  I(X) = i X  (g-skew for block-diagonal metrics; flats, HP^1)
//   right: I(X) = -X i (the convention compatible with the HP^n chart metric's
//                       beta term, which is built from right H-module products)
void standard_quaternionic_structure(int d, int which, bool rightmult,
                                     std::vector<double>& m) {
  m.assign(static_cast<std::size_t>(d) * d, 0.0);
  // 4x4 blocks, row-major: rows are outputs.
  static const double kLI[16] = {0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0};
  static const double kLJ[16] = {0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0};
  static const double kLK[16] = {0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0};
  static const double kRI[16] = {0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0};
  static const double kRJ[16] = {0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, -1, 0, 0};
  static const double kRK[16] = {0, 0, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0, -1, 0, 0, 0};
  const double* blk = rightmult ? (which == 0 ? kRI : (which == 1 ? kRJ : kRK))
                                : (which == 0 ? kLI : (which == 1 ? kLJ : kLK));
  for (int s = 0; s + 3 < d; s += 4)
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        m[static_cast<std::size_t>(s + r) * d + (s + c)] = blk[r * 4 + c];
}

StructFn constant_structure(int d, StructureKind kind, bool rightmult = false) {
  return [d, kind, rightmult](const double* /*x*/, int which, int order, std::vector<Jet>& out) {
    std::vector<double> m;
    if (kind == StructureKind::Kahler)
      standard_complex_structure(d, m);
    else
      standard_quaternionic_structure(d, which, rightmult, m);
    out.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = Jet::constant(m[i], d, order);
  };
}

// ---------- packed helpers ----------

inline int pidx(int d, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}

// ---------- flat entries ----------

MetricFn flat_metric(int d) {
  return [d](const double* /*x*/, int order, std::vector<Jet>& g) {
    g.assign(static_cast<std::size_t>(d * (d + 1) / 2), Jet());
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        g[static_cast<std::size_t>(pidx(d, i, j))] = Jet::constant(i == j ? 1.0 : 0.0, d, order);
  };
}

// ---------- Fubini-Study (CP^n), interleaved real chart ----------
// g_{i jbar} = delta_ij/sigma - zbar_i z_j/sigma^2, sigma = 1 + |z|^2; real
// blocks g(u_i,u_j) = g(v_i,v_j) = Re, g(u_i,v_j) = Im as in the Hermitian
// dictionary (flat C^n <-> identity).
MetricFn fs_metric(int n) {
  const int d = 2 * n;
  return [n, d](const double* x, int order, std::vector<Jet>& g) {
    Jet sigma = Jet::constant(1.0, d, order);
    std::vector<Jet> X(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      X[static_cast<std::size_t>(a)] = Jet::variable(x[a], a, d, order);
      sigma += X[static_cast<std::size_t>(a)] * X[static_cast<std::size_t>(a)];
    }
    const Jet is = 1.0 / sigma;
    const Jet is2 = is * is;
    g.assign(static_cast<std::size_t>(d * (d + 1) / 2), Jet());
    auto U = [&](int i) -> const Jet& { return X[static_cast<std::size_t>(2 * i)]; };
    auto V = [&](int i) -> const Jet& { return X[static_cast<std::size_t>(2 * i + 1)]; };
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet a = (U(i) * U(j) + V(i) * V(j)) * is2;
        if (i == j)
          a = is - a;
        else
          a = -a;
        const Jet b = (V(i) * U(j) - U(i) * V(j)) * is2;
        g[static_cast<std::size_t>(pidx(d, 2 * i, 2 * j))] = a;
        g[static_cast<std::size_t>(pidx(d, 2 * i + 1, 2 * j + 1))] = a;
        g[static_cast<std::size_t>(pidx(d, 2 * i, 2 * j + 1))] = b;
        if (i < j) g[static_cast<std::size_t>(pidx(d, 2 * i + 1, 2 * j))] = -b;
      }
  };
}

// Product CP^1 x CP^1: FS blocks on (x1,x2) and (x3,x4).
void cp1xcp1_metric(const double* x, int order, std::vector<Jet>& g) {
  const int d = 4;
  std::vector<Jet> X(4);
  for (int a = 0; a < 4; ++a) X[static_cast<std::size_t>(a)] = Jet::variable(x[a], a, d, order);
  const Jet s1 = 1.0 + X[0] * X[0] + X[1] * X[1];
  const Jet s2 = 1.0 + X[2] * X[2] + X[3] * X[3];
  const Jet w1 = 1.0 / (s1 * s1);
  const Jet w2 = 1.0 / (s2 * s2);
  g.assign(10, Jet::constant(0.0, d, order));
  g[static_cast<std::size_t>(pidx(d, 0, 0))] = w1;
  g[static_cast<std::size_t>(pidx(d, 1, 1))] = w1;
  g[static_cast<std::size_t>(pidx(d, 2, 2))] = w2;
  g[static_cast<std::size_t>(pidx(d, 3, 3))] = w2;
}

// ---------- quaternionic projective chart (HP^n) ----------

struct QJet {
  Jet w, x, y, z;
};

QJet qconj(const QJet& q) { return {q.w, -q.x, -q.y, -q.z}; }

QJet qmul(const QJet& a, const QJet& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

// g(X,Y) = <X,Y>/sigma - beta(X,Y)/sigma^2 with
// beta_ab = <qbar_{s(a)} e_{u(a)}, qbar_{s(b)} e_{u(b)}>_{R^4}.
MetricFn hp_metric(int n) {
  const int d = 4 * n;
  return [n, d](const double* x, int order, std::vector<Jet>& g) {
    std::vector<Jet> X(static_cast<std::size_t>(d));
    Jet sigma = Jet::constant(1.0, d, order);
    for (int a = 0; a < d; ++a) {
      X[static_cast<std::size_t>(a)] = Jet::variable(x[a], a, d, order);
      sigma += X[static_cast<std::size_t>(a)] * X[static_cast<std::size_t>(a)];
    }
    const Jet is = 1.0 / sigma;
    const Jet is2 = is * is;
    const Jet zero = Jet::constant(0.0, d, order);
    const Jet one = Jet::constant(1.0, d, order);
    // c_a = qbar_{s} * e_u for a = 4s+u; columns of the beta factor.
    std::vector<QJet> c(static_cast<std::size_t>(d));
    for (int s = 0; s < n; ++s) {
      const QJet qb = qconj({X[static_cast<std::size_t>(4 * s)], X[static_cast<std::size_t>(4 * s + 1)],
                             X[static_cast<std::size_t>(4 * s + 2)], X[static_cast<std::size_t>(4 * s + 3)]});
      c[static_cast<std::size_t>(4 * s + 0)] = qb;
      c[static_cast<std::size_t>(4 * s + 1)] = qmul(qb, {zero, one, zero, zero});
      c[static_cast<std::size_t>(4 * s + 2)] = qmul(qb, {zero, zero, one, zero});
      c[static_cast<std::size_t>(4 * s + 3)] = qmul(qb, {zero, zero, zero, one});
    }
    g.assign(static_cast<std::size_t>(d * (d + 1) / 2), Jet());
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        const QJet &ca = c[static_cast<std::size_t>(a)], &cb = c[static_cast<std::size_t>(b)];
        Jet beta = ca.w * cb.w + ca.x * cb.x + ca.y * cb.y + ca.z * cb.z;
        Jet val = -(beta * is2);
        if (a == b) val += is;
        g[static_cast<std::size_t>(pidx(d, a, b))] = val;
      }
  };
}

// ---------- round sphere, polar chart ----------

void s2_polar_metric(const double* x, int order, std::vector<Jet>& g) {
  const int d = 2;
  const Jet th = Jet::variable(x[0], 0, d, order);
  const Jet s = sin(th);
  g.assign(3, Jet());
  g[0] = Jet::constant(1.0, d, order);
  g[1] = Jet::constant(0.0, d, order);
  g[2] = s * s;
}

void s2_polar_structure(const double* x, int /*which*/, int order, std::vector<Jet>& out) {
  const int d = 2;
  const Jet th = Jet::variable(x[0], 0, d, order);
  const Jet s = sin(th);
  out.assign(4, Jet::constant(0.0, d, order));
  out[0 * 2 + 1] = -s;        // (J X)^theta = -sin(theta) X^phi
  out[1 * 2 + 0] = 1.0 / s;   // (J X)^phi = X^theta / sin(theta)
}

// ---------- closed-form distances ----------

double cp_distance(int n, const Vec& p, const Vec& q) {
  // Homogeneous lift (1, z); Hermitian inner product on C^{n+1}.
  double re = 1.0, im = 0.0;  // <P,Q> = 1 + sum z_i(p) conj(z_i(q))
  double np = 1.0, nq = 1.0;
  for (int i = 0; i < n; ++i) {
    const double a = p[2 * i], b = p[2 * i + 1];
    const double c = q[2 * i], d2 = q[2 * i + 1];
    re += a * c + b * d2;
    im += b * c - a * d2;
    np += a * a + b * b;
    nq += c * c + d2 * d2;
  }
  double cosd = std::sqrt(re * re + im * im) / std::sqrt(np * nq);
  cosd = std::min(1.0, std::max(-1.0, cosd));
  return std::acos(cosd);
}

double hp_distance(int n, const Vec& p, const Vec& q) {
  // Homogeneous lift (1, q); quaternionic Hermitian product sum conj(P_i) Q_i.
  double s0 = 1.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  double np = 1.0, nq = 1.0;
  for (int i = 0; i < n; ++i) {
    const double aw = p[4 * i], ax = p[4 * i + 1], ay = p[4 * i + 2], az = p[4 * i + 3];
    const double bw = q[4 * i], bx = q[4 * i + 1], by = q[4 * i + 2], bz = q[4 * i + 3];
    // conj(a) * b
    s0 += aw * bw + ax * bx + ay * by + az * bz;
    s1 += aw * bx - ax * bw - ay * bz + az * by;
    s2 += aw * by + ax * bz - ay * bw - az * bx;
    s3 += aw * bz - ax * by + ay * bx - az * bw;
    np += aw * aw + ax * ax + ay * ay + az * az;
    nq += bw * bw + bx * bx + by * by + bz * bz;
  }
  double cosd = std::sqrt(s0 * s0 + s1 * s1 + s2 * s2 + s3 * s3) / std::sqrt(np * nq);
  cosd = std::min(1.0, std::max(-1.0, cosd));
  return std::acos(cosd);
}

// ---------- volume samplers ----------

Vec sphere_dir(Rng& rng, int d) {
  Vec v(d);
  double n2 = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.gaussian();
    n2 = v.squaredNorm();
  } while (n2 < 1e-12);
  return v / std::sqrt(n2);
}

std::function<Vec(Rng&)> cp_sampler(int n, double arc_cap) {
  const int d = 2 * n;
  return [n, d, arc_cap](Rng& rng) {
    // radial arc density ~ sin^{2n-1} u cos u: CDF = (sin u / sin cap)^{2n}
    const double u = std::asin(std::sin(arc_cap) * std::pow(rng.uniform(), 1.0 / (2 * n)));
    return Vec(std::tan(u) * sphere_dir(rng, d));
  };
}

std::function<Vec(Rng&)> hp_sampler(int n, double arc_cap) {
  const int d = 4 * n;
  return [n, d, arc_cap](Rng& rng) {
    // density ~ sin^{4n-1} u cos^3 u; envelope sin^{4n-1} cos (accept w.p. cos^2).
    for (;;) {
      const double u = std::asin(std::sin(arc_cap) * std::pow(rng.uniform(), 1.0 / (4 * n)));
      const double c = std::cos(u);
      if (rng.uniform() <= c * c) return Vec(std::tan(u) * sphere_dir(rng, d));
    }
  };
}

// ---------- DSL twins ----------

std::vector<dsl::Expression> parse_matrix(const std::vector<std::string>& rows, int d) {
  if (static_cast<int>(rows.size()) != d * d)
    throw ConfigError("internal: DSL matrix entry count mismatch");
  std::vector<dsl::Expression> out;
  out.reserve(rows.size());
  for (const auto& s : rows) out.push_back(dsl::Expression::parse(s));
  return out;
}

std::string fs_sigma_str(int n) {
  std::string s = "(1";
  for (int a = 1; a <= 2 * n; ++a) s += " + x" + std::to_string(a) + "^2";
  return s + ")";
}

// Full d*d DSL twin of the FS real metric.
std::vector<dsl::Expression> fs_dsl(int n) {
  const int d = 2 * n;
  const std::string sig = fs_sigma_str(n);
  auto u = [&](int i) { return "x" + std::to_string(2 * i + 1); };
  auto v = [&](int i) { return "x" + std::to_string(2 * i + 2); };
  std::vector<std::string> rows(static_cast<std::size_t>(d) * d, "0");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::string a = "(" + u(i) + "*" + u(j) + " + " + v(i) + "*" + v(j) + ")/" + sig + "^2";
      a = (i == j) ? ("1/" + sig + " - " + a) : ("-(" + a + ")");
      const std::string b =
          "(" + v(i) + "*" + u(j) + " - " + u(i) + "*" + v(j) + ")/" + sig + "^2";
      rows[static_cast<std::size_t>(2 * i) * d + 2 * j] = a;
      rows[static_cast<std::size_t>(2 * i + 1) * d + 2 * j + 1] = a;
      rows[static_cast<std::size_t>(2 * i) * d + 2 * j + 1] = b;
      rows[static_cast<std::size_t>(2 * i + 1) * d + 2 * j] = "-(" + b + ")";
    }
  return parse_matrix(rows, d);
}

HermitianForm fs_hermitian(int n) {
  HermitianForm h;
  h.n = n;
  const std::string sig = fs_sigma_str(n);
  auto u = [&](int i) { return "x" + std::to_string(2 * i + 1); };
  auto v = [&](int i) { return "x" + std::to_string(2 * i + 2); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::string re = "(" + u(i) + "*" + u(j) + " + " + v(i) + "*" + v(j) + ")/" + sig + "^2";
      re = (i == j) ? ("1/" + sig + " - " + re) : ("-(" + re + ")");
      const std::string im =
          "(" + v(i) + "*" + u(j) + " - " + u(i) + "*" + v(j) + ")/" + sig + "^2";
      h.re.push_back(dsl::Expression::parse(re));
      h.im.push_back(dsl::Expression::parse(im));
    }
  return h;
}

std::vector<dsl::Expression> diag_dsl(int d, const std::vector<std::string>& diag) {
  std::vector<std::string> rows(static_cast<std::size_t>(d) * d, "0");
  for (int i = 0; i < d; ++i) rows[static_cast<std::size_t>(i) * d + i] = diag[static_cast<std::size_t>(i)];
  return parse_matrix(rows, d);
}

DomainFn chart_ball(int d, double radius) {
  return [d, radius](const double* x) {
    double n2 = 0.0;
    for (int i = 0; i < d; ++i) n2 += x[i] * x[i];
    return radius - std::sqrt(n2);
  };
}

ManifoldSpec make_flat_c(int n) {
  ManifoldSpec m;
  m.name = "flat-c" + std::to_string(n);
  m.dim = 2 * n;
  m.kind = StructureKind::Kahler;
  m.metric = flat_metric(m.dim);
  m.structure = constant_structure(m.dim, StructureKind::Kahler);
  m.domain = chart_ball(m.dim, 1e6);
  {
    std::vector<std::string> diag(static_cast<std::size_t>(m.dim), "1");
    m.metric_dsl = diag_dsl(m.dim, diag);
  }
  m.anchors.einstein_c = 0.0;
  m.anchors.sectional_anchor = 0.0;
  m.anchors.ric_perp_anchor = 0.0;
  m.closed_distance = [](const Vec& p, const Vec& q) { return (p - q).norm(); };
  const int d = m.dim;
  m.volume_sample = [d](Rng& rng) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.uniform_in(-3.0, 3.0);
    return v;
  };
  return m;
}

ManifoldSpec make_flat_h(int n) {
  ManifoldSpec m = make_flat_c(2 * n);
  m.name = "flat-h" + std::to_string(n);
  m.kind = StructureKind::Quaternionic;
  m.structure = constant_structure(m.dim, StructureKind::Quaternionic);
  return m;
}

ManifoldSpec make_cp(int n) {
  ManifoldSpec m;
  m.name = "cp" + std::to_string(n);
  m.dim = 2 * n;
  m.kind = StructureKind::Kahler;
  m.metric = fs_metric(n);
  m.structure = constant_structure(m.dim, StructureKind::Kahler);
  m.domain = chart_ball(m.dim, 32.0);  // chart radius tan(arc), arc < 1.54
  m.metric_dsl = fs_dsl(n);
  m.hermitian = fs_hermitian(n);
  m.anchors.einstein_c = 2.0 * (n + 1);
  m.anchors.sectional_anchor = 4.0;
  m.anchors.ric_perp_anchor = 2.0 * n - 2.0;
  m.anchors.k_model = n >= 2 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  m.anchors.inj_hint = kPi / 2.0;
  m.anchors.diameter = kPi / 2.0;
  m.closed_distance = [n](const Vec& p, const Vec& q) { return cp_distance(n, p, q); };
  m.volume_sample = cp_sampler(n, 1.45);
  return m;
}

ManifoldSpec make_hp(int n) {
  ManifoldSpec m;
  m.name = "hp" + std::to_string(n);
  m.dim = 4 * n;
  m.kind = StructureKind::Quaternionic;
  m.metric = hp_metric(n);
  // n = 1 is conformally flat, where the left-multiplication span is the
  // parallel one; n >= 2 needs the right-module convention to match beta.
  m.structure = constant_structure(m.dim, StructureKind::Quaternionic, n >= 2);
  m.domain = chart_ball(m.dim, 32.0);
  if (n == 1) {
    const std::string sig = "(1 + x1^2 + x2^2 + x3^2 + x4^2)";
    std::vector<std::string> diag(4, "1/" + sig + "^2");
    m.metric_dsl = diag_dsl(4, diag);
  }
  m.anchors.einstein_c = 4.0 * (n + 2);
  m.anchors.sectional_anchor = 12.0;
  m.anchors.ric_perp_anchor = 4.0 * n - 4.0;
  m.anchors.k_model = n >= 2 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  m.anchors.inj_hint = kPi / 2.0;
  m.anchors.diameter = kPi / 2.0;
  m.closed_distance = [n](const Vec& p, const Vec& q) { return hp_distance(n, p, q); };
  m.volume_sample = hp_sampler(n, 1.45);
  return m;
}

ManifoldSpec make_cp1xcp1() {
  ManifoldSpec m;
  m.name = "cp1xcp1";
  m.dim = 4;
  m.kind = StructureKind::Kahler;
  m.metric = cp1xcp1_metric;
  m.structure = constant_structure(4, StructureKind::Kahler);
  m.domain = chart_ball(4, 32.0);
  {
    const std::string s1 = "(1 + x1^2 + x2^2)", s2 = "(1 + x3^2 + x4^2)";
    std::vector<std::string> diag = {"1/" + s1 + "^2", "1/" + s1 + "^2",
                                     "1/" + s2 + "^2", "1/" + s2 + "^2"};
    m.metric_dsl = diag_dsl(4, diag);
  }
  m.anchors.einstein_c = 4.0;
  m.anchors.inj_hint = kPi / 2.0;
  m.anchors.diameter = kPi / std::sqrt(2.0);
  m.closed_distance = [](const Vec& p, const Vec& q) {
    const double d1 = cp_distance(1, p.head(2), q.head(2));
    const double d2 = cp_distance(1, p.tail(2), q.tail(2));
    return std::sqrt(d1 * d1 + d2 * d2);
  };
  m.volume_sample = [](Rng& rng) {
    auto s = cp_sampler(1, 1.45);
    Vec v(4);
    v.head(2) = s(rng);
    v.tail(2) = s(rng);
    return v;
  };
  return m;
}

ManifoldSpec make_s2_polar() {
  ManifoldSpec m;
  m.name = "s2-polar";
  m.dim = 2;
  m.kind = StructureKind::Kahler;
  m.metric = s2_polar_metric;
  m.structure = s2_polar_structure;
  m.domain = [](const double* x) {
    return std::min(x[0] - 0.02, kPi - 0.02 - x[0]);
  };
  m.metric_dsl = parse_matrix({"1", "0", "0", "sin(x1)^2"}, 2);
  m.anchors.einstein_c = 1.0;
  m.anchors.sectional_anchor = 1.0;
  m.anchors.ric_perp_anchor = 0.0;
  m.anchors.inj_hint = kPi;
  m.anchors.diameter = kPi;
  m.closed_distance = [](const Vec& p, const Vec& q) {
    double c = std::cos(p[0]) * std::cos(q[0]) +
               std::sin(p[0]) * std::sin(q[0]) * std::cos(p[1] - q[1]);
    c = std::min(1.0, std::max(-1.0, c));
    return std::acos(c);
  };
  m.volume_sample = [](Rng& rng) {
    Vec v(2);
    v[0] = std::acos(rng.uniform_in(std::cos(kPi - 0.1), std::cos(0.1)));
    v[1] = rng.uniform_in(-kPi, kPi);
    return v;
  };
  return m;
}

}  // namespace

int structure_dim(StructureKind k, int d) {
  switch (k) {
    case StructureKind::Kahler: return d / 2;
    case StructureKind::Quaternionic: return d / 4;
    default: return d;
  }
}

int structure_count(StructureKind k) {
  switch (k) {
    case StructureKind::Kahler: return 1;
    case StructureKind::Quaternionic: return 3;
    default: return 0;
  }
}

Mat ManifoldSpec::metric_values(const double* x) const {
  std::vector<Jet> g;
  metric(x, 0, g);
  Mat G(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      G(i, j) = g[static_cast<std::size_t>(pidx(dim, i, j))].value();
      G(j, i) = G(i, j);
    }
  return G;
}

Mat ManifoldSpec::structure_values(const double* x, int which) const {
  std::vector<Jet> s;
  structure(x, which, 0, s);
  Mat S(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) S(i, j) = s[static_cast<std::size_t>(i * dim + j)].value();
  return S;
}

std::vector<std::string> catalog_names() {
  return {"flat-c1", "flat-c2", "flat-c3", "flat-h1", "flat-h2", "s2-polar",
          "cp1",     "cp2",     "cp3",     "cp1xcp1", "hp1",     "hp2"};
}

ManifoldSpec catalog_entry(const std::string& name) {
  if (name == "flat-c1") return make_flat_c(1);
  if (name == "flat-c2") return make_flat_c(2);
  if (name == "flat-c3") return make_flat_c(3);
  if (name == "flat-h1") return make_flat_h(1);
  if (name == "flat-h2") return make_flat_h(2);
  if (name == "s2-polar") return make_s2_polar();
  if (name == "cp1") return make_cp(1);
  if (name == "cp2") return make_cp(2);
  if (name == "cp3") return make_cp(3);
  if (name == "cp1xcp1") return make_cp1xcp1();
  if (name == "hp1") return make_hp(1);
  if (name == "hp2") return make_hp(2);
  throw ConfigError("unknown catalog manifold: " + name);
}

ManifoldSpec manifold_from_config(const Config& cfg) {
  ManifoldSpec m;
  m.name = cfg.get_str("manifold.name", "user");
  const long long d = cfg.get_int("manifold.dim");
  if (d < 1 || d > Jet::kMaxDim)
    throw ConfigError("manifold.dim must be in [1, " + std::to_string(Jet::kMaxDim) + "]");
  m.dim = static_cast<int>(d);
  const std::string kind = cfg.get_str("manifold.kind", "none");
  if (kind == "kahler") {
    if (m.dim % 2) throw ConfigError("kahler manifolds need even dimension");
    m.kind = StructureKind::Kahler;
  } else if (kind == "quaternionic") {
    if (m.dim % 4) throw ConfigError("quaternionic manifolds need dimension divisible by 4");
    m.kind = StructureKind::Quaternionic;
  } else if (kind == "none") {
    m.kind = StructureKind::None;
  } else {
    throw ConfigError("manifold.kind must be kahler, quaternionic, or none");
  }

  // Upper-triangle DSL entries; symmetry is implied.
  auto exprs = std::make_shared<std::vector<dsl::Expression>>(
      static_cast<std::size_t>(m.dim * (m.dim + 1) / 2));
  m.metric_dsl.resize(static_cast<std::size_t>(m.dim) * m.dim);
  for (int i = 0; i < m.dim; ++i)
    for (int j = i; j < m.dim; ++j) {
      const std::string key =
          "manifold.g" + std::to_string(i + 1) + std::to_string(j + 1);
      std::string src = cfg.get_str(key, i == j ? "" : "0");
      if (src.empty()) throw ConfigError("missing metric entry " + key);
      dsl::Expression e = dsl::Expression::parse(src);
      if (e.max_var() > m.dim)
        throw ConfigError(key + " references x" + std::to_string(e.max_var()) +
                          " beyond manifold.dim");
      (*exprs)[static_cast<std::size_t>(pidx(m.dim, i, j))] = e;
      m.metric_dsl[static_cast<std::size_t>(i) * m.dim + j] = e;
      m.metric_dsl[static_cast<std::size_t>(j) * m.dim + i] = e;
    }
  const int dim = m.dim;
  m.metric = [exprs, dim](const double* x, int order, std::vector<Jet>& g) {
    g.resize(exprs->size());
    for (std::size_t p = 0; p < exprs->size(); ++p) g[p] = (*exprs)[p].eval(x, dim, order);
  };

  if (m.kind != StructureKind::None) {
    const std::string st = cfg.get_str("manifold.structure", "standard");
    if (st == "standard") {
      m.structure = constant_structure(m.dim, m.kind);
    } else if (st == "dsl") {
      if (m.kind != StructureKind::Kahler)
        throw ConfigError("manifold.structure = dsl is supported for kahler manifolds only");
      auto jex = std::make_shared<std::vector<dsl::Expression>>();
      for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j)
          jex->push_back(dsl::Expression::parse(
              cfg.get_str("manifold.J" + std::to_string(i + 1) + std::to_string(j + 1))));
      m.structure = [jex, dim](const double* x, int /*which*/, int order, std::vector<Jet>& s) {
        s.resize(jex->size());
        for (std::size_t p = 0; p < jex->size(); ++p) s[p] = (*jex)[p].eval(x, dim, order);
      };
    } else {
      throw ConfigError("manifold.structure must be standard or dsl");
    }
  }

  const double guard = cfg.get_num("manifold.chart_radius", 1e6);
  m.domain = chart_ball(m.dim, guard);
  m.anchors.inj_hint = cfg.get_num("manifold.inj_hint", m.anchors.inj_hint);
  return m;
}

ManifoldSpec resolve_manifold(const Config& cfg) {
  if (cfg.has("manifold")) return catalog_entry(cfg.get_str("manifold"));
  if (cfg.has("manifold.dim")) return manifold_from_config(cfg);
  throw ConfigError("no manifold specified (set manifold = <catalog name> or a [manifold] section)");
}

}  // namespace orthocurv
