#include "orthocurv/comparison.hpp"

#include <algorithm>
#include <cmath>

#include "orthocurv/config.hpp"
#include "orthocurv/util.hpp"

namespace orthocurv {

void ComparisonModel::validate() const {
  if (!(k > 0.0)) throw ConfigError("comparison model: k must be positive");
  if (!(C >= 0.0)) throw ConfigError("comparison model: C must be nonnegative");
  if (n < 1) throw ConfigError("comparison model: n must be at least 1");
  if (m > 0.0 && m < real_dim())
    throw ConfigError("comparison model: m must be at least the real dimension");
}

ComparisonModel comparison_model_from_config(const Config& cfg) {
  ComparisonModel model;
  std::string kind = cfg.has("comparison.kind") ? cfg.get_str("comparison.kind") : "kahler";
  if (kind == "kahler")
    model.kind = StructureKind::Kahler;
  else if (kind == "quaternionic")
    model.kind = StructureKind::Quaternionic;
  else
    throw ConfigError("comparison.kind: expected kahler or quaternionic, got " + kind);
  std::string flavor =
      cfg.has("comparison.flavor") ? cfg.get_str("comparison.flavor") : "non_gradient_mZ";
  if (flavor == "gradient_bounded_phi")
    model.flavor = Flavor::GradientBoundedPhi;
  else if (flavor == "gradient_riccati")
    model.flavor = Flavor::GradientRiccati;
  else if (flavor == "non_gradient_mZ")
    model.flavor = Flavor::NonGradientMZ;
  else
    throw ConfigError("comparison.flavor: unknown flavor " + flavor);
  if (cfg.has("comparison.k")) model.k = cfg.get_num("comparison.k");
  if (cfg.has("comparison.n")) model.n = static_cast<int>(cfg.get_int("comparison.n"));
  if (cfg.has("comparison.C")) model.C = cfg.get_num("comparison.C");
  if (cfg.has("comparison.m")) model.m = cfg.get_num("comparison.m");
  model.validate();
  return model;
}

double s_func(double k, double t) { return std::sin(std::sqrt(k) * t); }

double s_prime(double k, double t) {
  const double sk = std::sqrt(k);
  return sk * std::cos(sk * t);
}

double s_ratio(double k, double t) {
  const double sk = std::sqrt(k);
  return sk * std::cos(sk * t) / std::sin(sk * t);
}

double comparison_barrier(const ComparisonModel& model) {
  const double pi = 3.14159265358979323846;
  if (model.kind == StructureKind::Kahler) return pi / (2.0 * std::sqrt(model.k));
  return pi / (2.0 * std::sqrt(3.0 * model.k));
}

double comparison_rhs(const ComparisonModel& model, double r, bool printed) {
  model.validate();
  const double barrier = comparison_barrier(model);
  if (!(r > 0.0) || !(r < barrier))
    throw ConfigError("comparison_rhs: r outside admissible interval (0, " +
                      std::to_string(barrier) + ")");
  const double m = model.m_eff();
  if (model.kind == StructureKind::Kahler)
    return (m - 2.0) * s_ratio(model.k, r) + s_ratio(4.0 * model.k, r);
  if (printed) return (m - 4.0) * s_ratio(model.k, r) + s_ratio(12.0 * model.k, r);
  return (m - 4.0) * s_ratio(model.k, r) + 3.0 * s_ratio(4.0 * model.k, r);
}

double comparison_rhs_head(const ComparisonModel& model, double r) {
  return (model.m_eff() - 1.0) / r;
}

void ComparisonReport::finalize(double tol) {
  margin.resize(r.size());
  worst_margin = std::numeric_limits<double>::infinity();
  equality = true;
  for (std::size_t i = 0; i < r.size(); ++i) {
    margin[i] = rhs[i] - lhs[i];
    worst_margin = std::min(worst_margin, margin[i]);
    if (!(std::abs(margin[i]) < tol)) equality = false;
  }
}

double diameter_bound(const ComparisonModel& model) {
  model.validate();
  const double pi = 3.14159265358979323846;
  const double k = model.k, C = model.C;
  const double nm1 = static_cast<double>(model.n - 1);
  switch (model.flavor) {
    case Flavor::GradientBoundedPhi: {
      if (model.n < 2) throw ConfigError("diameter_bound: gradient flavors need n >= 2");
      const double denom = model.kind == StructureKind::Kahler ? nm1 : 2.0 * nm1;
      return pi / std::sqrt(k) * std::sqrt(1.0 + std::sqrt(2.0) * C / denom);
    }
    case Flavor::GradientRiccati: {
      if (model.n < 2) throw ConfigError("diameter_bound: gradient flavors need n >= 2");
      const double scale = model.kind == StructureKind::Kahler ? 2.0 : 1.0;
      return pi / std::sqrt(nm1 * k) * std::sqrt(scale * std::sqrt(C) + nm1);
    }
    case Flavor::NonGradientMZ: {
      if (model.kind == StructureKind::Kahler) return pi / (2.0 * std::sqrt(k));
      return pi / (2.0 * std::sqrt(3.0 * k));
    }
  }
  throw ConfigError("diameter_bound: invalid flavor");
}

double riccati_c0(const ComparisonModel& model) {
  if (model.dperp() < 1) throw ConfigError("riccati: needs orthogonal directions (n >= 2)");
  return model.dperp() * model.k;
}

double riccati_c2(const ComparisonModel& model, double alpha) {
  const double dp = model.dperp();
  // alpha = 0 is the C = 0 optimum (alpha* = 2 sqrt(C)); take the limit
  // alpha/(alpha^2 + dp alpha) -> 1/dp there instead of evaluating 0/0.
  if (alpha == 0.0) {
    if (model.C != 0.0) throw ConfigError("riccati: alpha must be positive when C > 0");
    return 1.0 / dp;
  }
  if (!(alpha > 0.0)) throw ConfigError("riccati: alpha must be nonnegative");
  return alpha / (alpha * alpha + dp * alpha + 4.0 * model.C);
}

double riccati_bound(const ComparisonModel& model, double alpha, double r) {
  model.validate();
  const double c0 = riccati_c0(model), c2 = riccati_c2(model, alpha);
  const double p = std::sqrt(c0 / c2), q = std::sqrt(c0 * c2);
  const double pi = 3.14159265358979323846;
  if (!(r > 0.0) || !(r < pi / q))
    throw ConfigError("riccati_bound: r outside (0, pi/Q)");
  return p * std::cos(q * r) / std::sin(q * r);
}

double riccati_blowdown(const ComparisonModel& model, double alpha) {
  model.validate();
  const double pi = 3.14159265358979323846;
  return pi / std::sqrt(riccati_c0(model) * riccati_c2(model, alpha));
}

namespace {

double rk4(double y, double h, const std::function<double(double)>& f) {
  const double k1 = f(y);
  const double k2 = f(y + 0.5 * h * k1);
  const double k3 = f(y + 0.5 * h * k2);
  const double k4 = f(y + h * k3);
  return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

RiccatiSolution riccati_ode_solve(const ComparisonModel& model, double alpha, double r_max) {
  model.validate();
  if (!(r_max > 1e-3)) throw ConfigError("riccati_ode_solve: r_max too small");
  const double c0 = riccati_c0(model), c2 = riccati_c2(model, alpha);
  const double r0 = 1e-4;
  const int n_grid = 2000;
  RiccatiSolution sol;
  sol.r = linspace(r0, r_max, n_grid);
  sol.u.assign(sol.r.size(), std::numeric_limits<double>::quiet_NaN());

  // u' = -c2 u^2 - c0 is stiff wherever |u| is large: at the singular head
  // u ~ a/r (a = dp + alpha/2) and at the blow-down u -> -inf. The reciprocal
  // w = 1/u obeys the smooth flow w' = c2 + c0 w^2 there (|w| small), while
  // the u-form is smooth where |w| would hit its own pole (u = 0). Integrate
  // whichever representation is regular, switching at |u| = U_sw. Blow-down
  // is w crossing 0 from below (past the u < 0 branch); the crossing radius
  // is linearly interpolated.
  const auto fu = [&](double y) { return -c2 * y * y - c0; };
  const auto fw = [&](double y) { return c2 + c0 * y * y; };
  const double u_sw = 10.0 * std::max(1.0, std::sqrt(c0 / c2));
  bool w_mode = true;
  double y = r0 / (model.dperp() + 0.5 * alpha);  // w(r0)
  sol.u[0] = 1.0 / y;
  const int sub = 4;
  for (std::size_t i = 1; i < sol.r.size(); ++i) {
    const double h = (sol.r[i] - sol.r[i - 1]) / sub;
    for (int s = 0; s < sub; ++s) {
      const double y_prev = y;
      const bool was_w = w_mode;
      y = w_mode ? rk4(y, h, fw) : rk4(y, h, fu);
      if (!std::isfinite(y)) throw NumericError("riccati_ode_solve: step diverged");
      if (w_mode && y_prev < 0.0 && y >= 0.0) {
        sol.blew_down = true;
        sol.blow_down_r = sol.r[i - 1] + h * (s + y_prev / (y_prev - y));
        sol.r.resize(i);
        sol.u.resize(i);
        return sol;
      }
      if (was_w && std::abs(y) > 1.0 / u_sw) {
        y = 1.0 / y;  // |u| moderate again
        w_mode = false;
      } else if (!was_w && std::abs(y) > u_sw) {
        y = 1.0 / y;
        w_mode = true;
      }
    }
    sol.u[i] = w_mode ? (y != 0.0 ? 1.0 / y : std::numeric_limits<double>::infinity()) : y;
  }
  return sol;
}

}  // namespace orthocurv
