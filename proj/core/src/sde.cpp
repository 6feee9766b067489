#include "orthocurv/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <vector>

#include "orthocurv/curvature.hpp"
#include "orthocurv/util.hpp"

namespace orthocurv {

namespace {

// Drift evaluator for the 1-D comparison diffusion. Both corrected families
// collapse to a single tangent per evaluation:
//   (m-2) sqrt(k) cot(th) + 2 sqrt(k) cot(2 th)     = sqrt(k)(m-1 -  t^2)/t
//   (m-4) sqrt(k) cot(th) + 3*2 sqrt(k) cot(2 th)   = sqrt(k)(m-1 - 3t^2)/t
// with th = sqrt(k) rho, t = tan(th); the identity holds wherever t is finite
// and nonzero, which validate() guarantees on (0, barrier).
struct Drift {
  int mode = 0;  // 0 off, 1 fast tangent form
  double sk = 0.0, m = 0.0, s = 1.0;
  double operator()(double rho) const {
    if (mode == 0) return 0.0;
    const double t = std::tan(sk * rho);
    return sk * (m - 1.0 - s * t * t) / t;
  }
};

Drift make_drift(const DiffusionConfig& cfg) {
  Drift d;
  if (cfg.drift_off) return d;
  d.mode = 1;
  d.sk = std::sqrt(cfg.model.k);
  d.m = cfg.model.m_eff();
  d.s = (cfg.model.kind == StructureKind::Quaternionic) ? 3.0 : 1.0;
  return d;
}

struct StepAccum {
  double min_dt_eff = std::numeric_limits<double>::infinity();
  long long steps = 0;
};

constexpr double kHitEps = 1e-9;
constexpr double kUnderflowDt = 1e-14;

// One Euler-Maruyama path. `times`, when given, is an ascending checkpoint
// grid; `record[j]` receives the first post-step state with t >= times[j]
// (stopped paths freeze at their final state).
void run_path(const DiffusionConfig& cfg, double barrier, const Drift& drift,
              Rng rng, PathStat& st, StepAccum& acc,
              const std::vector<double>* times, double* record) {
  double rho = cfg.rho0;
  double t = 0.0;
  st.max_rho = rho;
  std::size_t ck = 0;
  // Generous hard cap: substep shrinkage past this means the path is stuck in
  // a stiff corner; flag it like an underflow rather than spin forever.
  const long long max_steps =
      50LL * static_cast<long long>(std::ceil(cfg.T / cfg.dt)) + 1000;
  long long n = 0;
  while (true) {
    const double rem = cfg.T - t;
    if (rem <= 0.0) break;
    const double dist = std::min(rho, barrier - rho);
    const double b = drift(rho);
    // Singularity-aware caps: drift displacement <= 0.1 dist, noise scale
    // sqrt(2 dt) <= dist/8.
    double cap = std::min(cfg.dt, dist * dist / 128.0);
    const double ab = std::abs(b);
    if (ab > 0.0) cap = std::min(cap, 0.1 * dist / ab);
    if (cap < kUnderflowDt || n >= max_steps) {
      st.underflow = true;
      break;
    }
    const double dt_eff = std::min(cap, rem);
    acc.min_dt_eff = std::min(acc.min_dt_eff, dt_eff);
    ++n;
    rho += std::sqrt(2.0 * dt_eff) * rng.gaussian() + b * dt_eff;
    t += dt_eff;
    if (rho < cfg.eps_floor) rho = 2.0 * cfg.eps_floor - rho;
    if (rho > st.max_rho) st.max_rho = rho;
    const bool hit = rho >= barrier - kHitEps;
    if (hit) {
      st.hit = true;
      st.hit_time = t;
    }
    if (times) {
      while (ck < times->size() && t >= (*times)[ck] - 1e-15) record[ck++] = rho;
    }
    if (hit) break;
  }
  st.terminal = rho;
  acc.steps = n;
  if (times) {
    while (ck < times->size()) record[ck++] = rho;
  }
}

// Canonical per-path byte stream for the content hash: NaNs are mapped to -1
// so the digest is independent of NaN payload bits.
void append_path_words(std::vector<double>& w, const PathStat& s) {
  w.push_back(s.terminal);
  w.push_back(s.max_rho);
  w.push_back(s.hit ? 1.0 : 0.0);
  w.push_back(s.hit ? s.hit_time : -1.0);
  w.push_back(s.underflow ? 1.0 : 0.0);
}

DiffusionEnsemble ensemble_run(const DiffusionConfig& cfg,
                               const std::vector<double>* times,
                               std::vector<double>* fanbuf) {
  cfg.validate();
  const double barrier = cfg.resolved_barrier();
  const Drift drift = make_drift(cfg);
  const auto np = static_cast<std::size_t>(cfg.paths);

  DiffusionEnsemble ens;
  ens.per_path.resize(np);
  std::vector<StepAccum> acc(np);
  const std::size_t nt = times ? times->size() : 0;
  if (fanbuf) fanbuf->assign(np * nt, 0.0);

  Rng root(cfg.seed);
  parallel_for(np, cfg.threads, [&](std::size_t i) {
    run_path(cfg, barrier, drift, root.fork(i), ens.per_path[i], acc[i], times,
             fanbuf ? fanbuf->data() + i * nt : nullptr);
  });

  // Sequential reduction in path order; aggregates and hash are schedule-free.
  std::vector<double> words;
  words.reserve(np * 5);
  double sum = 0.0, max_rho = 0.0, min_dt = std::numeric_limits<double>::infinity();
  long long nterm = 0, nsteps = 0;
  for (std::size_t i = 0; i < np; ++i) {
    const PathStat& s = ens.per_path[i];
    append_path_words(words, s);
    nsteps += acc[i].steps;
    if (s.underflow) {
      ++ens.underflows;
      continue;
    }
    if (s.hit) ++ens.hits;
    max_rho = std::max(max_rho, s.max_rho);
    min_dt = std::min(min_dt, acc[i].min_dt_eff);
    if (!s.hit) {
      sum += s.terminal;
      ++nterm;
    }
  }
  ens.max_rho = max_rho;
  ens.min_dt_eff = std::isfinite(min_dt) ? min_dt : 0.0;
  ens.mean_steps = static_cast<double>(nsteps) / static_cast<double>(np);
  ens.mean_terminal = nterm > 0 ? sum / static_cast<double>(nterm) : 0.0;
  double ss = 0.0;
  for (const PathStat& s : ens.per_path)
    if (!s.underflow && !s.hit) {
      const double d = s.terminal - ens.mean_terminal;
      ss += d * d;
    }
  ens.var_terminal = nterm > 1 ? ss / static_cast<double>(nterm - 1) : 0.0;
  ens.content_hash = fnv1a64(words.data(), words.size() * sizeof(double));
  return ens;
}

}  // namespace

double DiffusionConfig::resolved_barrier() const {
  return barrier > 0.0 ? barrier : comparison_barrier(model);
}

void DiffusionConfig::validate() const {
  model.validate();
  const double B = resolved_barrier();
  if (!(B > 0.0) || !std::isfinite(B)) throw ConfigError("sde: barrier must be finite and positive");
  // The tangent-form drift has its first interior pole at pi/(2 sqrt k);
  // the reflecting/absorbing interval must stay on its left.
  const double pole = std::numbers::pi / (2.0 * std::sqrt(model.k));
  if (!drift_off && B > pole * (1.0 + 1e-12))
    throw ConfigError("sde: barrier lies beyond the drift singularity pi/(2 sqrt k)");
  if (!(rho0 > 0.0) || rho0 >= B) throw ConfigError("sde: rho0 must lie in (0, barrier)");
  if (!(T > 0.0)) throw ConfigError("sde: T must be positive");
  if (!(dt > 0.0)) throw ConfigError("sde: dt must be positive");
  if (paths < 1) throw ConfigError("sde: paths must be >= 1");
  if (!(eps_floor > 0.0) || eps_floor >= rho0)
    throw ConfigError("sde: eps_floor must lie in (0, rho0)");
}

DiffusionEnsemble simulate_rho(const DiffusionConfig& cfg) {
  return ensemble_run(cfg, nullptr, nullptr);
}

RhoFan simulate_rho_fan(const DiffusionConfig& cfg, int n_times) {
  if (n_times < 1) throw ConfigError("sde: fan needs n_times >= 1");
  RhoFan fan;
  fan.t.resize(static_cast<std::size_t>(n_times));
  for (int j = 0; j < n_times; ++j)
    fan.t[static_cast<std::size_t>(j)] = cfg.T * static_cast<double>(j + 1) / n_times;
  std::vector<double> buf;
  const DiffusionEnsemble ens = ensemble_run(cfg, &fan.t, &buf);
  const std::size_t np = ens.per_path.size(), nt = fan.t.size();
  fan.quantiles.assign(nt, {});
  static constexpr double kP[5] = {0.05, 0.25, 0.50, 0.75, 0.95};
  std::vector<double> col;
  col.reserve(np);
  for (std::size_t j = 0; j < nt; ++j) {
    col.clear();
    for (std::size_t i = 0; i < np; ++i)
      if (!ens.per_path[i].underflow) col.push_back(buf[i * nt + j]);
    if (col.empty()) throw NumericError("sde: all paths underflowed");
    std::sort(col.begin(), col.end());
    for (int q = 0; q < 5; ++q) {
      const double pos = kP[q] * static_cast<double>(col.size() - 1);
      const auto lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, col.size() - 1);
      const double f = pos - static_cast<double>(lo);
      fan.quantiles[j][static_cast<std::size_t>(q)] = col[lo] * (1.0 - f) + col[hi] * f;
    }
  }
  return fan;
}

namespace {

// Log-clustered grid of K nodes from `endpoint + a` toward the midpoint;
// `from_left` mirrors the clustering. Returned ascending.
std::vector<double> side_grid(double endpoint, double x0, double a, int K, bool from_left) {
  std::vector<double> u(static_cast<std::size_t>(K));
  const double H = std::abs(x0 - endpoint);
  const double ratio = H / a;
  for (int i = 0; i < K; ++i) {
    const double tau = static_cast<double>(i) / (K - 1);
    const double off = a * std::pow(ratio, from_left ? tau : 1.0 - tau);
    u[static_cast<std::size_t>(i)] = from_left ? endpoint + off : endpoint - off;
  }
  // Snap the midpoint node exactly (pow roundoff).
  if (from_left)
    u.back() = x0;
  else
    u.front() = x0;
  return u;
}

// Scale s and speed m on the grid: s'(x) = exp(-int_{x0}^{x} b), m = 1/s'.
// `i0` indexes the node at x0. Exponents are clamped at +-700 (saturation is
// harmless: classification only needs divergence trends).
void scale_speed(const std::function<double(double)>& b, const std::vector<double>& u,
                 std::size_t i0, std::vector<double>& s, std::vector<double>& m) {
  const std::size_t K = u.size();
  std::vector<double> bv(K), cum(K, 0.0);
  for (std::size_t i = 0; i < K; ++i) bv[i] = b(u[i]);
  for (std::size_t i = 1; i < K; ++i)
    cum[i] = cum[i - 1] + 0.5 * (bv[i] + bv[i - 1]) * (u[i] - u[i - 1]);
  std::vector<double> sp(K);
  for (std::size_t i = 0; i < K; ++i) {
    const double e = std::clamp(-(cum[i] - cum[i0]), -700.0, 700.0);
    sp[i] = std::exp(e);
  }
  m.resize(K);
  for (std::size_t i = 0; i < K; ++i) m[i] = 1.0 / sp[i];
  s.assign(K, 0.0);
  for (std::size_t i = 1; i < K; ++i)
    s[i] = s[i - 1] + 0.5 * (sp[i] + sp[i - 1]) * (u[i] - u[i - 1]);
}

// Trapezoid of f(i) over nodes [p, q].
template <class F>
double trapz(const std::vector<double>& u, std::size_t p, std::size_t q, F f) {
  double acc = 0.0;
  for (std::size_t i = p + 1; i <= q; ++i)
    acc += 0.5 * (f(i) + f(i - 1)) * (u[i] - u[i - 1]);
  return acc;
}

void classify(EndpointClass& e) {
  const double dS1 = e.sigma[1] - e.sigma[0], dS2 = e.sigma[2] - e.sigma[1];
  const double dN1 = e.nval[1] - e.nval[0], dN2 = e.nval[2] - e.nval[1];
  e.sigma_ratio = dS1 > 1e-300 ? dS2 / dS1 : 0.0;
  e.n_ratio = dN1 > 1e-300 ? dN2 / dN1 : 0.0;
  const auto trend = [](double r) { return r >= 0.5 ? 1 : (r <= 0.25 ? -1 : 0); };
  const int ts = trend(e.sigma_ratio), tn = trend(e.n_ratio);
  if (ts < 0) {
    e.accessible = true;
    e.cls = "accessible";
  } else if (ts > 0) {
    e.accessible = false;
    e.cls = tn < 0 ? "entrance" : (tn > 0 ? "natural" : "inaccessible");
  } else {
    e.accessible = false;
    e.cls = "inconclusive";
  }
}

}  // namespace

BoundaryReport boundary_classification_generic(const std::function<double(double)>& b,
                                               double left, double right) {
  if (!(right > left)) throw ConfigError("sde: boundary interval is empty");
  const double W = right - left;
  const double x0 = 0.5 * (left + right);
  // Ladder of shrinking cutoffs; decade-spaced, scaled down only when the
  // interval itself is tiny.
  const double scale = std::min(1.0, W / 0.04);
  const std::array<double, 3> eps = {1e-2 * scale, 1e-3 * scale, 1e-4 * scale};
  const double a = eps[2] / 10.0;
  const int K = 4001;

  BoundaryReport rep;
  rep.left_end = left;
  rep.right_end = right;

  {  // left endpoint
    const std::vector<double> u = side_grid(left, x0, a, K, true);
    std::vector<double> s, m;
    scale_speed(b, u, u.size() - 1, s, m);
    for (int j = 0; j < 3; ++j) {
      const auto p = static_cast<std::size_t>(
          std::lower_bound(u.begin(), u.end(), left + eps[static_cast<std::size_t>(j)]) -
          u.begin());
      const std::size_t q = u.size() - 1;
      rep.left.sigma[static_cast<std::size_t>(j)] =
          trapz(u, p, q, [&](std::size_t i) { return (s[i] - s[p]) * m[i]; });
      rep.left.nval[static_cast<std::size_t>(j)] =
          trapz(u, p, q, [&](std::size_t i) { return (s[q] - s[i]) * m[i]; });
    }
    classify(rep.left);
  }
  {  // right endpoint (mirrored functionals)
    const std::vector<double> u = side_grid(right, x0, a, K, false);
    std::vector<double> s, m;
    scale_speed(b, u, 0, s, m);
    for (int j = 0; j < 3; ++j) {
      auto q = static_cast<std::size_t>(
          std::upper_bound(u.begin(), u.end(), right - eps[static_cast<std::size_t>(j)]) -
          u.begin());
      if (q > 0) --q;
      rep.right.sigma[static_cast<std::size_t>(j)] =
          trapz(u, 0, q, [&](std::size_t i) { return (s[q] - s[i]) * m[i]; });
      rep.right.nval[static_cast<std::size_t>(j)] =
          trapz(u, 0, q, [&](std::size_t i) { return (s[i] - s[0]) * m[i]; });
    }
    classify(rep.right);
  }
  return rep;
}

BoundaryReport boundary_classification(const ComparisonModel& model, bool printed) {
  model.validate();
  const double B = comparison_barrier(model);
  return boundary_classification_generic(
      [&](double r) { return comparison_rhs(model, r, printed); }, 0.0, B);
}

ManifoldEnsemble manifold_diffusion(const ManifoldSpec& spec, const ManifoldDiffusionConfig& cfg) {
  const int d = spec.dim;
  if (d < 1) throw ConfigError("sde: manifold dimension must be >= 1");
  if (cfg.q.size() != d) throw ConfigError("sde: start point has wrong dimension");
  if (!cfg.Z.empty() && cfg.Z.size() != static_cast<std::size_t>(d))
    throw ConfigError("sde: Z must have one component per chart coordinate");
  if (!(cfg.T > 0.0) || !(cfg.dt > 0.0)) throw ConfigError("sde: T and dt must be positive");
  if (cfg.paths < 1) throw ConfigError("sde: paths must be >= 1");
  if (cfg.n_dist < 1) throw ConfigError("sde: n_dist must be >= 1");
  const bool track_r = static_cast<bool>(spec.closed_distance) && cfg.p.size() == d;
  if (track_r && (cfg.p - cfg.q).norm() == 0.0)
    throw ConfigError("sde: radial base must differ from start");
  if (!(spec.domain(cfg.q.data()) > 0.0)) throw ConfigError("sde: start point outside chart");

  const auto nsteps = static_cast<long long>(std::ceil(cfg.T / cfg.dt));
  const auto np = static_cast<std::size_t>(cfg.paths);

  ManifoldEnsemble ens;
  ens.per_path.resize(np);

  Rng root(cfg.seed);
  parallel_for(np, cfg.threads, [&](std::size_t ip) {
    Rng rng = root.fork(ip);
    ManifoldPathStat& st = ens.per_path[ip];
    Vec x = cfg.q;
    Mat ginv(d, d);
    std::vector<double> gamma;
    Vec drift(d), xi(d), dx(d);
    double r_max = track_r ? spec.closed_distance(cfg.p, x) : 0.0;
    double t = 0.0;
    for (long long n = 0; n < nsteps; ++n) {
      const double h = std::min(cfg.dt, cfg.T - t);
      if (h <= 0.0) break;
      if (!(spec.domain(x.data()) > 0.0)) {
        st.exited = true;
        break;
      }
      try {
        christoffel_at(spec, x.data(), ginv, gamma);
      } catch (const NumericError&) {
        st.exited = true;
        break;
      }
      // Generator Lap + Z: Ito drift -g^{ij} Gamma^k_{ij} + Z^k, noise
      // sqrt(2h) sigma xi with sigma sigma^T = g^{-1}.
      for (int k = 0; k < d; ++k) {
        double a = 0.0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            a -= ginv(i, j) * gamma[static_cast<std::size_t>((k * d + i) * d + j)];
        drift[k] = a;
      }
      if (!cfg.Z.empty()) {
        try {
          for (int k = 0; k < d; ++k)
            drift[k] += cfg.Z[static_cast<std::size_t>(k)].eval_value(x.data(), d);
        } catch (const NumericError&) {
          st.exited = true;
          break;
        }
      }
      Eigen::LLT<Mat> llt(ginv);
      if (llt.info() != Eigen::Success) {
        st.exited = true;
        break;
      }
      for (int k = 0; k < d; ++k) xi[k] = rng.gaussian();
      const Vec noise = llt.matrixL() * xi;
      dx = std::sqrt(2.0 * h) * noise + h * drift;
      x += dx;
      t += h;
      if (track_r && (n % cfg.n_dist == cfg.n_dist - 1 || n == nsteps - 1) &&
          spec.domain(x.data()) > 0.0)
        r_max = std::max(r_max, spec.closed_distance(cfg.p, x));
    }
    if (!st.exited) {
      st.sq_disp = (x - cfg.q).squaredNorm();
      if (track_r) {
        st.terminal_r = spec.closed_distance(cfg.p, x);
        st.max_r = std::max(r_max, st.terminal_r);
      }
    }
  });

  std::vector<double> words;
  words.reserve(np * 4);
  double sum = 0.0, rmax = -1.0;
  long long nok = 0;
  for (const ManifoldPathStat& s : ens.per_path) {
    words.push_back(std::isnan(s.terminal_r) ? -1.0 : s.terminal_r);
    words.push_back(std::isnan(s.max_r) ? -1.0 : s.max_r);
    words.push_back(s.sq_disp);
    words.push_back(s.exited ? 1.0 : 0.0);
    if (s.exited) {
      ++ens.exits;
      continue;
    }
    sum += s.sq_disp;
    ++nok;
    if (!std::isnan(s.max_r)) rmax = std::max(rmax, s.max_r);
  }
  ens.mean_sq_disp = nok > 0 ? sum / static_cast<double>(nok) : 0.0;
  if (rmax >= 0.0) ens.max_r = rmax;
  ens.valid = ens.exits * 100 <= cfg.paths;
  ens.content_hash = fnv1a64(words.data(), words.size() * sizeof(double));
  return ens;
}

}  // namespace orthocurv
