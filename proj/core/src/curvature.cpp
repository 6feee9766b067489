#include "orthocurv/curvature.hpp"

#include <Eigen/Eigenvalues>

#include "orthocurv/frames.hpp"

namespace orthocurv {

namespace {

inline int pidx(int d, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}

struct MetricJets {
  int d;
  Mat G, Ginv;
  // A[a](i,j) = d_a g_ij ; B[(a*d+b)](i,j) = d_a d_b g_ij (order 2 only)
  std::vector<Mat> A, B;
};

MetricJets unpack_metric(const ManifoldSpec& spec, const double* x, int order) {
  const int d = spec.dim;
  std::vector<Jet> gp = spec.metric_jets(x, order);
  MetricJets m;
  m.d = d;
  m.G.resize(d, d);
  m.A.assign(static_cast<std::size_t>(d), Mat::Zero(d, d));
  if (order >= 2) m.B.assign(static_cast<std::size_t>(d) * d, Mat::Zero(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const Jet& e = gp[static_cast<std::size_t>(pidx(d, i, j))];
      m.G(i, j) = m.G(j, i) = e.value();
      for (int a = 0; a < d; ++a) {
        m.A[static_cast<std::size_t>(a)](i, j) = m.A[static_cast<std::size_t>(a)](j, i) = e.grad(a);
        if (order >= 2)
          for (int b = 0; b < d; ++b) {
            Mat& Bab = m.B[static_cast<std::size_t>(a * d + b)];
            Bab(i, j) = Bab(j, i) = e.hess(a, b);
          }
      }
    }
  Eigen::LLT<Mat> llt(m.G);
  if (llt.info() != Eigen::Success)
    throw NumericError("metric not positive definite at evaluation point");
  m.Ginv = llt.solve(Mat::Identity(d, d));
  return m;
}

void christoffel_from(const MetricJets& m, std::vector<double>& gamma) {
  const int d = m.d;
  gamma.assign(static_cast<std::size_t>(d) * d * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Vec c(d);  // C_l = (1/2)(d_i g_jl + d_j g_il - d_l g_ij)
      for (int l = 0; l < d; ++l)
        c[l] = 0.5 * (m.A[static_cast<std::size_t>(i)](j, l) + m.A[static_cast<std::size_t>(j)](i, l) -
                      m.A[static_cast<std::size_t>(l)](i, j));
      Vec gk = m.Ginv * c;
      for (int k = 0; k < d; ++k) {
        gamma[static_cast<std::size_t>((k * d + i) * d + j)] = gk[k];
        gamma[static_cast<std::size_t>((k * d + j) * d + i)] = gk[k];
      }
    }
}

}  // namespace

double Curvature::r4(const Vec& X, const Vec& Y, const Vec& Z, const Vec& W) const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    if (X[i] == 0.0) continue;
    for (int j = 0; j < dim; ++j) {
      if (Y[j] == 0.0) continue;
      for (int k = 0; k < dim; ++k) {
        if (Z[k] == 0.0) continue;
        double acc = 0.0;
        for (int l = 0; l < dim; ++l) acc += riem(i, j, k, l) * W[l];
        s += X[i] * Y[j] * Z[k] * acc;
      }
    }
  }
  return s;
}

double Curvature::sectional(const Vec& u, const Vec& v) const {
  const double uu = ip(u, u), vv = ip(v, v), uv = ip(u, v);
  const double area2 = uu * vv - uv * uv;
  if (area2 < 1e-18) throw NumericError("sectional: degenerate plane");
  return r4(u, v, v, u) / area2;
}

Curvature curvature_at(const ManifoldSpec& spec, const double* x) {
  const int d = spec.dim;
  MetricJets m = unpack_metric(spec, x, 2);
  Curvature c;
  c.dim = d;
  c.x = Eigen::Map<const Vec>(x, d);
  c.g = m.G;
  c.ginv = m.Ginv;
  christoffel_from(m, c.gamma);

  // dGamma[(a*d+k)*d*d + i*d + j] = d_a Gamma^k_{ij}
  // d_a ginv = -ginv (d_a g) ginv
  std::vector<Mat> dGinv(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a)
    dGinv[static_cast<std::size_t>(a)] = -m.Ginv * m.A[static_cast<std::size_t>(a)] * m.Ginv;
  std::vector<double> dgamma(static_cast<std::size_t>(d) * d * d * d, 0.0);
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Vec c0(d), c1(d);
        for (int l = 0; l < d; ++l) {
          c0[l] = 0.5 * (m.A[static_cast<std::size_t>(i)](j, l) + m.A[static_cast<std::size_t>(j)](i, l) -
                         m.A[static_cast<std::size_t>(l)](i, j));
          c1[l] = 0.5 * (m.B[static_cast<std::size_t>(a * d + i)](j, l) +
                         m.B[static_cast<std::size_t>(a * d + j)](i, l) -
                         m.B[static_cast<std::size_t>(a * d + l)](i, j));
        }
        Vec gk = dGinv[static_cast<std::size_t>(a)] * c0 + m.Ginv * c1;
        for (int k = 0; k < d; ++k) {
          dgamma[static_cast<std::size_t>(((a * d + k) * d + i) * d + j)] = gk[k];
          dgamma[static_cast<std::size_t>(((a * d + k) * d + j) * d + i)] = gk[k];
        }
      }

  // R_{ijkl} = g_{lm}(d_i Gamma^m_{jk} - d_j Gamma^m_{ik}
  //            + Gamma^p_{jk} Gamma^m_{ip} - Gamma^p_{ik} Gamma^m_{jp})
  c.riemann.assign(static_cast<std::size_t>(d) * d * d * d, 0.0);
  auto dG = [&](int a, int k, int i, int j) {
    return dgamma[static_cast<std::size_t>(((a * d + k) * d + i) * d + j)];
  };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      for (int k = 0; k < d; ++k) {
        Vec rm(d);
        for (int mm = 0; mm < d; ++mm) {
          double v = dG(i, mm, j, k) - dG(j, mm, i, k);
          for (int p = 0; p < d; ++p)
            v += c.chr(p, j, k) * c.chr(mm, i, p) - c.chr(p, i, k) * c.chr(mm, j, p);
          rm[mm] = v;
        }
        Vec low = m.G * rm;
        for (int l = 0; l < d; ++l)
          c.riemann[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)] = low[l];
      }
    }

  c.ricci = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double s = 0.0;
      for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) s += m.Ginv(i, l) * c.riem(i, j, k, l);
      c.ricci(j, k) = s;
    }
  c.ricci = 0.5 * (c.ricci + c.ricci.transpose()).eval();
  c.scalar = (m.Ginv * c.ricci).trace();
  return c;
}

void christoffel_at(const ManifoldSpec& spec, const double* x, Mat& ginv,
                    std::vector<double>& gamma) {
  MetricJets m = unpack_metric(spec, x, 1);
  ginv = m.Ginv;
  christoffel_from(m, gamma);
}

double holomorphic_sectional(const ManifoldSpec& spec, const Curvature& c, const Vec& v) {
  if (spec.kind != StructureKind::Kahler)
    throw ConfigError("holomorphic_sectional requires a kahler manifold");
  return structure_sectional(spec, c, v);
}

double quaternionic_sectional(const ManifoldSpec& spec, const Curvature& c, const Vec& v) {
  if (spec.kind != StructureKind::Quaternionic)
    throw ConfigError("quaternionic_sectional requires a quaternionic manifold");
  return structure_sectional(spec, c, v);
}

double structure_sectional(const ManifoldSpec& spec, const Curvature& c, const Vec& v) {
  if (spec.kind == StructureKind::None)
    throw ConfigError("structure sectional curvature needs a structured manifold");
  const double n2 = c.ip(v, v);
  if (!(n2 > 1e-18)) throw NumericError("structure_sectional: zero vector");
  double s = 0.0;
  for (int w = 0; w < structure_count(spec.kind); ++w) {
    const Mat S = spec.structure_values(c.x.data(), w);
    const Vec sv = S * v;
    s += c.r4(v, sv, sv, v);
  }
  return s / (n2 * n2);
}

RicPerp orthogonal_ricci(const ManifoldSpec& spec, const Curvature& c, const Vec& v,
                         const std::vector<int>* perm) {
  if (spec.kind == StructureKind::None)
    throw ConfigError("orthogonal_ricci needs a structured manifold");
  if (std::fabs(c.ip(v, v) - 1.0) > 1e-9)
    throw NumericError("orthogonal_ricci: v must be a unit vector");
  RicPerp r;
  r.via_decomposition = v.dot(c.ricci * v) - structure_sectional(spec, c, v);
  const Mat E = adapted_frame(spec, c.g, c.x.data(), v, perm);
  const int skip = 1 + structure_count(spec.kind);
  double s = 0.0;
  for (int i = skip; i < c.dim; ++i) {
    const Vec e = E.col(i);
    s += c.r4(v, e, e, v);
  }
  r.via_frame_sum = s;
  return r;
}

EinsteinFit einstein_fit(const Curvature& c) {
  EinsteinFit f;
  f.c = c.scalar / c.dim;
  f.residual = (c.ricci - f.c * c.g).cwiseAbs().maxCoeff();
  return f;
}

Vec gradient(const ManifoldSpec& spec, const dsl::Expression& f, const double* x) {
  const int d = spec.dim;
  MetricJets m = unpack_metric(spec, x, 0);
  const Jet fj = f.eval(x, d, 1);
  Vec df(d);
  for (int i = 0; i < d; ++i) df[i] = fj.grad(i);
  return m.Ginv * df;
}

Mat hessian(const ManifoldSpec& spec, const dsl::Expression& f, const double* x) {
  const int d = spec.dim;
  Mat ginv;
  std::vector<double> gamma;
  christoffel_at(spec, x, ginv, gamma);
  const Jet fj = f.eval(x, d, 2);
  Mat h(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double v = fj.hess(i, j);
      for (int k = 0; k < d; ++k)
        v -= gamma[static_cast<std::size_t>((k * d + i) * d + j)] * fj.grad(k);
      h(i, j) = h(j, i) = v;
    }
  return h;
}

double laplacian(const ManifoldSpec& spec, const dsl::Expression& f, const double* x) {
  const int d = spec.dim;
  Mat ginv;
  std::vector<double> gamma;
  christoffel_at(spec, x, ginv, gamma);
  const Jet fj = f.eval(x, d, 2);
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double v = fj.hess(i, j);
      for (int k = 0; k < d; ++k)
        v -= gamma[static_cast<std::size_t>((k * d + i) * d + j)] * fj.grad(k);
      s += ginv(i, j) * v;
    }
  return s;
}

double orthogonal_laplacian(const ManifoldSpec& spec, const dsl::Expression& f,
                            const double* x, const std::vector<int>* perm) {
  const int d = spec.dim;
  const Mat G = spec.metric_values(x);
  const Mat H = hessian(spec, f, x);
  const Jet fj = f.eval(x, d, 1);
  Vec df(d);
  for (int i = 0; i < d; ++i) df[i] = fj.grad(i);
  Eigen::LLT<Mat> llt(G);
  const Vec grad = llt.solve(df);
  if (grad.dot(G * grad) < 1e-18)
    throw NumericError("orthogonal_laplacian: vanishing gradient");
  const Mat E = adapted_frame(spec, G, x, grad, perm);
  const int skip = 1 + structure_count(spec.kind);
  double s = 0.0;
  for (int i = skip; i < d; ++i) s += E.col(i).dot(H * E.col(i));
  return s;
}

Mat nabla_z_flat(const ManifoldSpec& spec, const std::vector<dsl::Expression>& Z,
                 const double* x) {
  const int d = spec.dim;
  if (static_cast<int>(Z.size()) != d)
    throw ConfigError("vector field needs exactly d components");
  Mat ginv;
  std::vector<double> gamma;
  christoffel_at(spec, x, ginv, gamma);
  const Mat G = spec.metric_values(x);
  // DZ(i,k) = nabla_i Z^k = d_i Z^k + Gamma^k_{im} Z^m
  Mat DZ(d, d);
  Vec zv(d);
  std::vector<Jet> zj(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    zj[static_cast<std::size_t>(k)] = Z[static_cast<std::size_t>(k)].eval(x, d, 1);
    zv[k] = zj[static_cast<std::size_t>(k)].value();
  }
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      double v = zj[static_cast<std::size_t>(k)].grad(i);
      for (int mm = 0; mm < d; ++mm)
        v += gamma[static_cast<std::size_t>((k * d + i) * d + mm)] * zv[mm];
      DZ(i, k) = v;
    }
  Mat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double v = 0.0;
      for (int k = 0; k < d; ++k) v += 0.5 * (G(i, k) * DZ(j, k) + G(j, k) * DZ(i, k));
      out(i, j) = out(j, i) = v;
    }
  return out;
}

Mat lie_derivative_metric(const ManifoldSpec& spec, const std::vector<dsl::Expression>& Z,
                          const double* x) {
  const int d = spec.dim;
  if (static_cast<int>(Z.size()) != d)
    throw ConfigError("vector field needs exactly d components");
  std::vector<Jet> gp = spec.metric_jets(x, 1);
  std::vector<Jet> zj(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) zj[static_cast<std::size_t>(k)] = Z[static_cast<std::size_t>(k)].eval(x, d, 1);
  Mat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      // (L_Z g)_{ij} = Z^k d_k g_ij + g_kj d_i Z^k + g_ik d_j Z^k
      double v = 0.0;
      for (int k = 0; k < d; ++k) {
        v += zj[static_cast<std::size_t>(k)].value() *
             gp[static_cast<std::size_t>(pidx(d, i, j))].grad(k);
        v += gp[static_cast<std::size_t>(pidx(d, k, j))].value() *
             zj[static_cast<std::size_t>(k)].grad(i);
        v += gp[static_cast<std::size_t>(pidx(d, i, k))].value() *
             zj[static_cast<std::size_t>(k)].grad(j);
      }
      out(i, j) = out(j, i) = v;
    }
  return out;
}

double bakry_emery_mz(const ManifoldSpec& spec, const Curvature& c, const Vec& v, double m,
                      const std::vector<dsl::Expression>& Z, bool printed_denominator) {
  const int d = spec.dim;
  const double denom_dim =
      printed_denominator ? static_cast<double>(structure_dim(spec.kind, d)) : static_cast<double>(d);
  double val = orthogonal_ricci(spec, c, v).via_decomposition;
  const bool z_zero = Z.empty();
  if (!z_zero) {
    val -= v.dot(nabla_z_flat(spec, Z, c.x.data()) * v);
    Vec zv(d);
    for (int k = 0; k < d; ++k)
      zv[k] = Z[static_cast<std::size_t>(k)].eval_value(c.x.data(), d);
    const double zdotv = zv.dot(c.g * v);
    if (m <= denom_dim)
      throw ConfigError("bakry_emery_mz: m must exceed the denominator dimension unless Z = 0");
    val -= zdotv * zdotv / (m - denom_dim);
  } else if (m < denom_dim) {
    throw ConfigError("bakry_emery_mz: m below dimension");
  }
  return val;
}

double bakry_emery_gradient(const ManifoldSpec& spec, const Curvature& c, const Vec& v,
                            const dsl::Expression& phi) {
  const Mat H = hessian(spec, phi, c.x.data());
  return orthogonal_ricci(spec, c, v).via_decomposition + v.dot(H * v);
}

std::vector<double> structure_covariant_derivative(const ManifoldSpec& spec,
                                                   const Curvature& c, int which) {
  const int d = spec.dim;
  std::vector<Jet> sj = spec.structure_jets(c.x.data(), which, 1);
  std::vector<double> out(static_cast<std::size_t>(d) * d * d, 0.0);
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double v = sj[static_cast<std::size_t>(i) * d + j].grad(a);
        for (int k = 0; k < d; ++k)
          v += c.chr(i, a, k) * sj[static_cast<std::size_t>(k) * d + j].value() -
               c.chr(k, a, j) * sj[static_cast<std::size_t>(i) * d + k].value();
        out[static_cast<std::size_t>((a * d + i) * d + j)] = v;
      }
  return out;
}

Vec sample_point(const ManifoldSpec& spec, Rng& rng) {
  if (spec.volume_sample) return spec.volume_sample(rng);
  const int d = spec.dim;
  for (int tries = 0; tries < 200; ++tries) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = rng.uniform_in(-0.9, 0.9);
    if (!spec.domain || spec.domain(x.data()) > 0.0) return x;
  }
  throw ConfigError("sample_point: chart domain rejected 200 consecutive box samples");
}

Vec sample_unit(const ManifoldSpec& spec, const Mat& g, Rng& rng) {
  const int d = spec.dim;
  Vec v(d);
  double n2 = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.gaussian();
    n2 = v.dot(g * v);
  } while (n2 < 1e-12);
  return v / std::sqrt(n2);
}

StructureCheck structure_check(const ManifoldSpec& spec, int sample_count, std::uint64_t seed) {
  if (spec.kind == StructureKind::None)
    throw ConfigError("structure_check needs a structured manifold");
  const int d = spec.dim;
  const int ns = structure_count(spec.kind);
  StructureCheck rep;
  rep.samples = sample_count;
  Rng rng(seed);
  for (int s = 0; s < sample_count; ++s) {
    Rng r = rng.fork(static_cast<std::uint64_t>(s));
    const Vec x = sample_point(spec, r);
    const Mat G = spec.metric_values(x.data());
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues().minCoeff());
    std::vector<Mat> S(static_cast<std::size_t>(ns));
    for (int w = 0; w < ns; ++w) {
      S[static_cast<std::size_t>(w)] = spec.structure_values(x.data(), w);
      const Mat& Sw = S[static_cast<std::size_t>(w)];
      rep.alg_residual = std::max(rep.alg_residual,
                                  (Sw * Sw + Mat::Identity(d, d)).cwiseAbs().maxCoeff());
      const Mat GS = G * Sw;
      rep.alg_residual = std::max(rep.alg_residual, (GS + GS.transpose()).cwiseAbs().maxCoeff());
    }
    if (ns == 3)
      rep.alg_residual =
          std::max(rep.alg_residual, (S[0] * S[1] - S[2]).cwiseAbs().maxCoeff());

    const Curvature c = curvature_at(spec, x.data());
    if (ns == 1) {
      const std::vector<double> D = structure_covariant_derivative(spec, c, 0);
      for (double e : D) rep.parallel_residual = std::max(rep.parallel_residual, std::fabs(e));
    } else {
      // residual of projecting nabla_a S onto span{I,J,K} (Frobenius LSQ)
      Mat gram(3, 3);
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
          gram(p, q) = (S[static_cast<std::size_t>(p)].array() *
                        S[static_cast<std::size_t>(q)].array())
                           .sum();
      Eigen::LDLT<Mat> sol(gram);
      for (int w = 0; w < 3; ++w) {
        const std::vector<double> D = structure_covariant_derivative(spec, c, w);
        for (int a = 0; a < d; ++a) {
          Mat Da(d, d);
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
              Da(i, j) = D[static_cast<std::size_t>((a * d + i) * d + j)];
          Vec rhs(3);
          for (int p = 0; p < 3; ++p)
            rhs[p] = (S[static_cast<std::size_t>(p)].array() * Da.array()).sum();
          const Vec coef = sol.solve(rhs);
          Mat res = Da;
          for (int p = 0; p < 3; ++p) res -= coef[p] * S[static_cast<std::size_t>(p)];
          rep.parallel_residual = std::max(rep.parallel_residual, res.norm());
        }
      }
    }
  }
  return rep;
}

ChernCurvature chern_curvature(const ManifoldSpec& spec, const double* x) {
  if (!spec.hermitian.present())
    throw ConfigError("chern_curvature: manifold carries no holomorphic-chart components");
  const int n = spec.hermitian.n;
  const int d = 2 * n;
  using Cplx = std::complex<double>;
  std::vector<Jet> U(static_cast<std::size_t>(n) * n), V(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) {
    U[static_cast<std::size_t>(i)] = spec.hermitian.re[static_cast<std::size_t>(i)].eval(x, d, 2);
    V[static_cast<std::size_t>(i)] = spec.hermitian.im[static_cast<std::size_t>(i)].eval(x, d, 2);
  }
  auto uid = [n](int i, int p) { return static_cast<std::size_t>(i * n + p); };
  Eigen::MatrixXcd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < n; ++p) M(i, p) = Cplx(U[uid(i, p)].value(), V[uid(i, p)].value());
  const Eigen::MatrixXcd Minv = M.inverse();

  // dz[k](i,p) = d g_{i pbar}/dz_k ; dzb[l](i,p) = d g_{i pbar}/dzbar_l
  auto wirt = [&](const Jet& uu, const Jet& vv, int k, bool bar) {
    const double ux = uu.grad(2 * k), uy = uu.grad(2 * k + 1);
    const double vx = vv.grad(2 * k), vy = vv.grad(2 * k + 1);
    if (!bar) return Cplx(0.5 * (ux + vy), 0.5 * (vx - uy));
    return Cplx(0.5 * (ux - vy), 0.5 * (vx + uy));
  };
  auto wirt2 = [&](const Jet& uu, const Jet& vv, int k, int l) {
    // d^2/dz_k dzbar_l = (1/4)[(P u - Q v) + i (P v + Q u)],
    // P = d_{2k}d_{2l} + d_{2k+1}d_{2l+1}, Q = d_{2k}d_{2l+1} - d_{2k+1}d_{2l}
    const double Pu = uu.hess(2 * k, 2 * l) + uu.hess(2 * k + 1, 2 * l + 1);
    const double Pv = vv.hess(2 * k, 2 * l) + vv.hess(2 * k + 1, 2 * l + 1);
    const double Qu = uu.hess(2 * k, 2 * l + 1) - uu.hess(2 * k + 1, 2 * l);
    const double Qv = vv.hess(2 * k, 2 * l + 1) - vv.hess(2 * k + 1, 2 * l);
    return 0.25 * Cplx(Pu - Qv, Pv + Qu);
  };

  ChernCurvature ch;
  ch.n = n;
  ch.r.assign(static_cast<std::size_t>(n) * n * n * n, Cplx(0, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Cplx v = -wirt2(U[uid(i, j)], V[uid(i, j)], k, l);
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
              // g^{q pbar} = (M^{-1})_{p q}
              v += Minv(p, q) * wirt(U[uid(i, p)], V[uid(i, p)], k, false) *
                   wirt(U[uid(q, j)], V[uid(q, j)], l, true);
            }
          ch.r[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] = v;
        }
  return ch;
}

double chern_holomorphic_sectional(const ManifoldSpec& spec, const ChernCurvature& ch,
                                   const double* x, const Vec& v) {
  const int n = ch.n;
  using Cplx = std::complex<double>;
  std::vector<Cplx> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = Cplx(v[2 * i], v[2 * i + 1]);
  Cplx h(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jet uu = spec.hermitian.re[static_cast<std::size_t>(i * n + j)].eval(x, 2 * n, 0);
      const Jet vv = spec.hermitian.im[static_cast<std::size_t>(i * n + j)].eval(x, 2 * n, 0);
      h += Cplx(uu.value(), vv.value()) * c[static_cast<std::size_t>(i)] *
           std::conj(c[static_cast<std::size_t>(j)]);
    }
  Cplx r(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          r += ch.at(i, j, k, l) * c[static_cast<std::size_t>(i)] *
               std::conj(c[static_cast<std::size_t>(j)]) * c[static_cast<std::size_t>(k)] *
               std::conj(c[static_cast<std::size_t>(l)]);
  return 2.0 * r.real() / (h.real() * h.real());
}

}  // namespace orthocurv
