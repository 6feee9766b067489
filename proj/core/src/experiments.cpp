#include "orthocurv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "orthocurv/curvature.hpp"
#include "orthocurv/geodesic.hpp"

namespace orthocurv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

bool usable_base(const ManifoldSpec& spec, const Vec& p) {
  if (spec.domain(p.data()) <= 0.0) return false;
  try {
    Mat g = spec.metric_values(p.data());
    Eigen::LLT<Mat> llt(g);
    return llt.info() == Eigen::Success;
  } catch (const NumericError&) {
    return false;
  }
}

// Base point for radial experiments: the chart origin when admissible (polar
// charts exclude it), else a contracted volume sample.
Vec radial_base(const ManifoldSpec& spec, Rng& rng) {
  Vec zero = Vec::Zero(spec.dim);
  if (usable_base(spec, zero)) return zero;
  for (int a = 0; a < 64; ++a) {
    Vec p = sample_point(spec, rng) * 0.2;
    if (usable_base(spec, p)) return p;
  }
  for (int a = 0; a < 64; ++a) {
    Vec p = sample_point(spec, rng);
    if (usable_base(spec, p)) return p;
  }
  throw NumericError("no usable base point found in the chart");
}

int random_var(Rng& rng, int d) {
  const int v = static_cast<int>(rng.uniform_in(0.0, static_cast<double>(d)));
  return 1 + std::min(d - 1, std::max(0, v));
}

}  // namespace

Json HypothesisScan::to_json() const {
  Json j = Json::object();
  j.set("samples", Json::integer(samples));
  j.set("ric_perp_vacuous", Json::boolean(ric_perp_vacuous));
  if (!ric_perp_vacuous) j.set("min_ric_perp_adjusted", Json::num(min_ric_perp));
  j.set("min_structure_sectional", Json::num(min_sect));
  j.set("k_admissible", Json::num(k_admissible));
  j.set("k_admissible_printed_normalization", Json::num(k_admissible_printed));
  j.set("c_measured", Json::num(c_measured));
  j.set("hypotheses_hold", Json::boolean(ok));
  if (!reason.empty()) j.set("reason", Json::str(reason));
  return j;
}

HypothesisScan measure_hypotheses(const ManifoldSpec& spec, const ComparisonModel& model,
                                  const dsl::Expression* phi,
                                  const std::vector<dsl::Expression>* Z, int samples,
                                  std::uint64_t seed) {
  if (spec.kind == StructureKind::None)
    throw ConfigError("comparison hypotheses need a Kahler or quaternionic structure");
  if (spec.kind != model.kind)
    throw ConfigError("comparison model kind does not match the manifold structure");
  if (samples < 1) throw ConfigError("hypothesis scan needs at least one sample");
  if (Z != nullptr && static_cast<int>(Z->size()) != spec.dim)
    throw ConfigError("drift field Z needs one component per chart coordinate");

  HypothesisScan out;
  out.samples = samples;
  const bool kahler = spec.kind == StructureKind::Kahler;
  out.ric_perp_vacuous = spec.dim <= (kahler ? 2 : 4);
  const double m_eff = model.m_eff();
  const bool grad_flavor = model.flavor != Flavor::NonGradientMZ;

  Rng root(seed);
  for (int i = 0; i < samples; ++i) {
    Rng rng = root.fork(static_cast<std::uint64_t>(i));
    Vec p = sample_point(spec, rng);
    Curvature c = curvature_at(spec, p.data());
    Vec v = sample_unit(spec, c.g, rng);
    out.min_sect = std::min(out.min_sect, structure_sectional(spec, c, v));
    if (!out.ric_perp_vacuous) {
      double tensor;
      if (grad_flavor && phi != nullptr)
        tensor = bakry_emery_gradient(spec, c, v, *phi);
      else if (!grad_flavor && Z != nullptr)
        tensor = bakry_emery_mz(spec, c, v, m_eff, *Z);
      else
        tensor = orthogonal_ricci(spec, c, v).via_decomposition;
      out.min_ric_perp = std::min(out.min_ric_perp, tensor);
    }
    const double rad = p.norm();
    out.max_chart_radius = std::max(out.max_chart_radius, rad);
    if (phi != nullptr) {
      const double av = std::abs(phi->eval_value(p.data(), spec.dim));
      if (av > out.c_measured) {
        out.c_measured = av;
        out.phi_sup_radius = rad;
      }
    }
    if (Z != nullptr) {
      Vec z(spec.dim);
      for (int a = 0; a < spec.dim; ++a) z[a] = (*Z)[a].eval_value(p.data(), spec.dim);
      out.c_measured = std::max(out.c_measured, std::sqrt(std::max(0.0, z.dot(c.g * z))));
    }
  }

  const double sect_k = kahler ? out.min_sect / 4.0 : out.min_sect / 12.0;
  if (out.ric_perp_vacuous) {
    out.k_admissible = sect_k;
    out.k_admissible_printed = sect_k;
  } else if (grad_flavor) {
    out.k_admissible = out.min_ric_perp / model.dperp();
    out.k_admissible_printed = out.k_admissible;
  } else {
    const double denom = kahler ? (m_eff - 2.0) : (m_eff - 4.0);
    out.k_admissible = std::min(out.min_ric_perp / denom, sect_k);
    out.k_admissible_printed = std::min(out.min_ric_perp / (2.0 * m_eff - 2.0), sect_k);
  }
  out.ok = out.k_admissible > 1e-9;
  if (!out.ok) out.reason = "no positive admissible curvature constant over the samples";
  return out;
}

IdentityScan riemann_identity_scan(const ManifoldSpec& spec, int samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("identity scan needs at least one sample");
  IdentityScan out;
  out.samples = samples;
  const int d = spec.dim;
  Rng root(seed);
  for (int i = 0; i < samples; ++i) {
    Rng rng = root.fork(static_cast<std::uint64_t>(i));
    Vec p = sample_point(spec, rng);
    Curvature c = curvature_at(spec, p.data());
    double scale = 1.0;
    for (double rr : c.riemann) scale = std::max(scale, std::abs(rr));
    auto rnd = [&] {
      Vec v(d);
      for (int a = 0; a < d; ++a) v[a] = rng.gaussian();
      return Vec(v / v.norm());
    };
    const Vec X = rnd(), Y = rnd(), W = rnd(), U = rnd();
    const double r0 = c.r4(X, Y, W, U);
    out.sym = std::max({out.sym, std::abs(r0 + c.r4(Y, X, W, U)) / scale,
                        std::abs(r0 + c.r4(X, Y, U, W)) / scale,
                        std::abs(r0 - c.r4(W, U, X, Y)) / scale});
    out.bianchi = std::max(
        out.bianchi, std::abs(r0 + c.r4(Y, W, X, U) + c.r4(W, X, Y, U)) / scale);
    if (spec.kind == StructureKind::Kahler) {
      const Mat J = spec.structure_values(p.data(), 0);
      out.j_invariance =
          std::max(out.j_invariance, std::abs(c.r4(J * X, J * Y, W, U) - r0) / scale);
    }
  }
  return out;
}

ManifoldSpec conformal_canary(const ManifoldSpec& spec, double amp) {
  if (spec.metric_dsl.empty())
    throw ConfigError("conformal canary needs a manifold with a textual metric");
  const int d = spec.dim;
  auto exprs = std::make_shared<std::vector<dsl::Expression>>(
      static_cast<std::size_t>(d * (d + 1) / 2));
  const std::string factor = "(1 + " + float17(amp) + "*sin(x1))";
  std::size_t q = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j, ++q)
      (*exprs)[q] = dsl::Expression::parse(
          factor + "*(" + spec.metric_dsl[static_cast<std::size_t>(i) * d + j].source() +
          ")");
  ManifoldSpec out = spec;
  out.name = spec.name + "-canary";
  out.metric = [exprs, d](const double* x, int order, std::vector<Jet>& g) {
    g.resize(exprs->size());
    for (std::size_t p = 0; p < exprs->size(); ++p) g[p] = (*exprs)[p].eval(x, d, order);
  };
  out.metric_dsl.clear();
  out.metric_dsl.resize(static_cast<std::size_t>(d) * d);
  q = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j, ++q) {
      out.metric_dsl[static_cast<std::size_t>(i) * d + j] = (*exprs)[q];
      out.metric_dsl[static_cast<std::size_t>(j) * d + i] = (*exprs)[q];
    }
  // Conformal scaling keeps g-compatibility of the structure tensors; the
  // closed distance, Hermitian potential, and anchors no longer apply.
  out.hermitian = HermitianForm{};
  const double inj = spec.anchors.inj_hint;
  out.anchors = Anchors{};
  out.anchors.inj_hint = inj;
  out.closed_distance = nullptr;
  return out;
}

// ---- Bochner ----

namespace {

Json bochner_term_row(const std::string& perm_name, const BochnerTerms& bt) {
  Json row = Json::object();
  row.set("frame", Json::str(perm_name));
  row.set("lhs_frame", Json::num(bt.lhs_frame));
  row.set("ric_perp", Json::num(bt.ric_perp));
  row.set("grad_lap_term", Json::num(bt.grad_lap_term));
  row.set("t4", Json::num(bt.t4));
  row.set("t5_norm", Json::num(bt.t5_norm));
  row.set("t5_cross", Json::num(bt.t5_cross));
  row.set("residual", Json::num(bt.residual));
  row.set("residual_printed", Json::num(bt.residual_printed));
  return row;
}

}  // namespace

BochnerOutcome bochner_outcome(const ManifoldSpec& spec, int samples, std::uint64_t seed,
                               double tol_override) {
  if (samples < 1) throw ConfigError("bochner: samples must be positive");
  BochnerOutcome out;
  out.samples = samples;
  out.per_term = Json::array();
  const int d = spec.dim;
  Rng root(seed);

  {
    Rng rng = root.fork(0x9001u);
    Vec p = radial_base(spec, rng);
    Curvature c = curvature_at(spec, p.data());
    double mx = 0.0;
    for (double rr : c.riemann) mx = std::max(mx, std::abs(rr));
    out.flat_mode = mx < 1e-10;
  }
  out.tol = tol_override > 0.0 ? tol_override : (out.flat_mode ? 1e-8 : 1e-4);

  std::vector<int> reversed(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) reversed[static_cast<std::size_t>(a)] = d - 1 - a;

  if (out.flat_mode) {
    int collected = 0;
    for (int i = 0; collected < samples && i < 20 * samples; ++i) {
      Rng rng = root.fork(static_cast<std::uint64_t>(i));
      Vec p = sample_point(spec, rng) * 0.5;
      if (spec.domain(p.data()) <= 0.0) continue;
      std::string poly;
      for (int a = 0; a < d; ++a)
        poly += (a ? " + " : "") + float17(rng.uniform_in(-1.0, 1.0)) + "*x" +
                std::to_string(a + 1);
      for (int t = 0; t < 3; ++t) {
        const int deg = rng.uniform() < 0.5 ? 2 : 3;
        poly += " + " + float17(rng.uniform_in(-1.0, 1.0));
        for (int u = 0; u < deg; ++u) poly += "*x" + std::to_string(random_var(rng, d));
      }
      try {
        dsl::Expression raw = dsl::Expression::parse(poly);
        Vec gr = gradient(spec, raw, p.data());
        Mat g = spec.metric_values(p.data());
        const double gn = std::sqrt(std::max(0.0, gr.dot(g * gr)));
        if (gn < 1e-6) continue;
        dsl::Expression f =
            dsl::Expression::parse(float17(1.0 / gn) + "*(" + poly + ")");
        BochnerTerms bt = bochner_terms(spec, f, p.data());
        const double res = std::abs(bt.residual);
        out.residuals.push_back(res);
        out.max_residual = std::max(out.max_residual, res);
        out.any_vacuous = out.any_vacuous || bt.vacuous;
        if (collected < 3) {
          BochnerTerms btr = bochner_terms(spec, f, p.data(), &reversed);
          out.max_perm_spread =
              std::max(out.max_perm_spread, std::abs(bt.residual - btr.residual));
          Json pair = Json::object();
          pair.set("sample", Json::integer(collected));
          Json rows = Json::array();
          rows.push(bochner_term_row("identity", bt));
          rows.push(bochner_term_row("reversed", btr));
          pair.set("terms", rows);
          out.per_term.push(pair);
        }
        ++collected;
      } catch (const NumericError&) {
        continue;
      }
    }
    if (collected < samples) {
      out.verdict = "SKIPPED";
      out.reason = "could not collect the requested polynomial samples";
      return out;
    }
  } else {
    if (spec.kind == StructureKind::Quaternionic) {
      StructureCheck sc = structure_check(spec, 25, seed);
      if (!sc.pass()) {
        out.verdict = "SKIPPED";
        out.reason = "structure validation gate failed";
        return out;
      }
    }
    const double rhi = std::min(1.2, 0.9 * spec.anchors.inj_hint);
    if (rhi <= 0.35) throw ConfigError("bochner: injectivity hint leaves no radial range");
    const std::vector<double> radii = linspace(0.3, rhi, 5);
    const double rmax = rhi + 0.05;
    const int ndir = (samples + 4) / 5;
    Rng brng = root.fork(0x7777u);
    const Vec base = radial_base(spec, brng);
    const Curvature cb = curvature_at(spec, base.data());
    int collected = 0;
    for (int j = 0; collected < samples && j < 3 * ndir + 8; ++j) {
      Rng rng = root.fork(static_cast<std::uint64_t>(j));
      Vec v = sample_unit(spec, cb.g, rng);
      try {
        RadialTable tab = radial_table(spec, base, v, rmax);
        for (std::size_t s = 0; s < radii.size() && collected < samples; ++s) {
          const int idx = tab.index_at(radii[s]);
          RadialBochnerSample rb = radial_bochner(spec, tab, idx);
          const double res = std::abs(rb.residual);
          out.residuals.push_back(res);
          out.max_residual = std::max(out.max_residual, res);
          if (spec.kind == StructureKind::Kahler)
            out.min_modified_margin = std::min(out.min_modified_margin, rb.modified_margin);
          if (collected < 5) {
            Json row = Json::object();
            row.set("r", Json::num(rb.r));
            row.set("ric_perp", Json::num(rb.ric_perp));
            row.set("d_lap_perp", Json::num(rb.d_lap_perp));
            row.set("s_norm2", Json::num(rb.s_norm2));
            row.set("lap_perp", Json::num(rb.lap_perp));
            row.set("residual", Json::num(rb.residual));
            row.set("cross_term_parallel", Json::num(rb.cross_term_parallel));
            row.set("cross_term_coordinate", Json::num(rb.cross_term_coordinate));
            out.per_term.push(row);
          }
          ++collected;
        }
      } catch (const NumericError&) {
        continue;
      }
    }
    if (collected < samples) {
      out.verdict = "SKIPPED";
      out.reason = "could not integrate enough radial directions";
      return out;
    }
  }
  out.verdict = out.max_residual <= out.tol ? "PASS" : "FAIL";
  if (out.verdict == "FAIL") out.reason = "max residual exceeds tolerance";
  return out;
}

// ---- comparison sweep ----

ComparisonSweep comparison_sweep(const ManifoldSpec& spec, ComparisonModel model,
                                 const Vec& base, std::vector<double> r_grid, int directions,
                                 const std::vector<dsl::Expression>* Z,
                                 const dsl::Expression* phi, int hyp_samples,
                                 std::uint64_t seed, bool use_measured_k) {
  if (directions < 1) throw ConfigError("comparison sweep needs at least one direction");
  if (r_grid.empty()) throw ConfigError("comparison sweep needs a nonempty radius grid");
  std::sort(r_grid.begin(), r_grid.end());
  if (r_grid.front() <= 0.0) throw ConfigError("comparison sweep radii must be positive");

  ComparisonSweep out;
  out.directions = directions;
  out.scan = measure_hypotheses(spec, model, phi, Z, hyp_samples, seed);
  if (use_measured_k) {
    if (!out.scan.ok) {
      out.model = model;
      out.verdict = "NOT-APPLICABLE";
      out.reason = out.scan.reason;
      return out;
    }
    model.k = out.scan.k_admissible;
  }
  model.validate();
  out.model = model;
  if (out.scan.ric_perp_vacuous)
    out.reason =
        "orthogonal Ricci hypothesis vacuous (structure span exhausts the tangent space); "
        "sweep uses the sectional constant";

  const double barrier = comparison_barrier(model);
  std::vector<double> grid;
  for (double r : r_grid) {
    if (r >= 0.985 * barrier) {
      ++out.dropped_beyond_barrier;
      continue;
    }
    grid.push_back(r);
  }
  if (grid.empty()) {
    out.verdict = "NOT-APPLICABLE";
    out.reason = "radius grid lies entirely at or beyond the comparison barrier";
    return out;
  }

  const double rmax = grid.back() + 1e-3;
  const Curvature cb = curvature_at(spec, base.data());
  std::vector<double> lhs(grid.size(), -kInf);
  std::vector<double> snapped(grid.size(), std::numeric_limits<double>::quiet_NaN());
  int built = 0;
  Rng root(seed);
  for (int j = 0; j < directions; ++j) {
    Rng rng = root.fork(0xD1500000ull + static_cast<std::uint64_t>(j));
    Vec v = sample_unit(spec, cb.g, rng);
    try {
      RadialTable tab = radial_table(spec, base, v, rmax);
      for (std::size_t s = 0; s < grid.size(); ++s) {
        const int idx = tab.index_at(grid[s]);
        // lhs and rhs are both evaluated at the snapped grid radius; the
        // drift Laplacian varies too fast near r = 0 to mix the two.
        snapped[s] = tab.t[static_cast<std::size_t>(idx)];
        double drift = tab.laplacian[static_cast<std::size_t>(idx)];
        if (Z != nullptr || phi != nullptr) {
          const Vec& x = tab.x[static_cast<std::size_t>(idx)];
          Vec w = Vec::Zero(spec.dim);
          if (Z != nullptr)
            for (int a = 0; a < spec.dim; ++a) w[a] = (*Z)[a].eval_value(x.data(), spec.dim);
          if (phi != nullptr) w -= gradient(spec, *phi, x.data());
          const Mat g = spec.metric_values(x.data());
          drift += (g * w).dot(tab.grad[static_cast<std::size_t>(idx)]);
        }
        lhs[s] = std::max(lhs[s], drift);
      }
      ++built;
    } catch (const NumericError&) {
      continue;
    }
  }
  if (built == 0) throw NumericError("comparison sweep: no radial direction integrated");

  double max_abs = 0.0;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const double rs = snapped[s];
    out.r.push_back(rs);
    out.lhs.push_back(lhs[s]);
    out.rhs.push_back(comparison_rhs(model, rs));
    out.rhs_printed.push_back(comparison_rhs(model, rs, true));
    out.margin.push_back(out.rhs.back() - lhs[s]);
    out.margin_printed.push_back(out.rhs_printed.back() - lhs[s]);
    out.worst_margin = std::min(out.worst_margin, out.margin.back());
    max_abs = std::max(max_abs, std::abs(out.margin.back()));
  }
  out.equality = max_abs < 1e-4;
  out.verdict = out.worst_margin >= -1e-4 ? "PASS" : "FAIL";
  if (out.verdict == "FAIL") out.reason = "comparison margin below -1e-4";
  return out;
}

// ---- Riccati sweep ----

RiccatiSweep riccati_sweep(const ComparisonModel& base, int cases, std::uint64_t seed) {
  if (cases < 1) throw ConfigError("riccati sweep needs at least one case");
  RiccatiSweep out;
  out.cases = cases;
  out.rows = Json::array();
  Rng root(seed);
  bool all_ok = true;

  for (int i = 0; i < cases; ++i) {
    Rng rng = root.fork(static_cast<std::uint64_t>(i));
    ComparisonModel m = base;
    m.flavor = Flavor::GradientRiccati;
    m.C = rng.uniform_in(0.25, 4.0);
    const double alpha = 2.0 * std::sqrt(m.C) * rng.uniform_in(0.35, 1.15);
    const double pole = riccati_blowdown(m, alpha);
    RiccatiSolution sol = riccati_ode_solve(m, alpha, 0.95 * pole);
    double slack = kInf;
    for (std::size_t s = 0; s < sol.r.size(); ++s)
      slack = std::min(slack, riccati_bound(m, alpha, sol.r[s]) - sol.u[s]);
    if (sol.blew_down) slack = std::min(slack, pole - sol.blow_down_r);
    out.min_slack = std::min(out.min_slack, slack);
    all_ok = all_ok && slack >= -1e-6;
    Json row = Json::object();
    row.set("C", Json::num(m.C));
    row.set("alpha", Json::num(alpha));
    row.set("bound_pole", Json::num(pole));
    row.set("min_slack", Json::num(slack));
    row.set("blew_down", Json::boolean(sol.blew_down));
    if (sol.blew_down) row.set("blow_down_r", Json::num(sol.blow_down_r));
    out.rows.push(row);
  }

  // C = 0, alpha -> 0 anchor: the bound and the solution coincide and blow
  // down at pi/sqrt(k).
  {
    ComparisonModel m = base;
    m.flavor = Flavor::GradientRiccati;
    m.C = 0.0;
    out.blowdown_closed = riccati_blowdown(m, 0.0);
    RiccatiSolution sol = riccati_ode_solve(m, 0.0, 1.1 * out.blowdown_closed);
    out.blowdown_ode =
        sol.blew_down ? sol.blow_down_r : std::numeric_limits<double>::quiet_NaN();
    all_ok = all_ok && sol.blew_down &&
             std::abs(out.blowdown_ode - out.blowdown_closed) <= 1e-3;
  }
  out.verdict = all_ok ? "PASS" : "FAIL";
  return out;
}

// ---- integral lemmas ----

LemmaSweep lemma_sweep(const ManifoldSpec& spec, int cases, std::uint64_t seed) {
  if (cases < 1) throw ConfigError("lemma sweep needs at least one case");
  LemmaSweep out;
  out.cases = cases;
  out.rows = Json::array();
  const int d = spec.dim;
  Rng root(seed);
  bool all_hold = true;
  int done = 0;

  for (int attempt = 0; done < cases && attempt < 8 * cases; ++attempt) {
    Rng rng = root.fork(static_cast<std::uint64_t>(attempt));
    Vec p = sample_point(spec, rng);
    Mat g = spec.metric_values(p.data());
    Vec v = sample_unit(spec, g, rng);
    double l = rng.uniform_in(0.5, 1.2);
    if (std::isfinite(spec.anchors.inj_hint)) l = std::min(l, 0.8 * spec.anchors.inj_hint);

    GeodesicPath path;
    bool built = false;
    for (int halving = 0; halving < 3 && !built; ++halving) {
      try {
        path = integrate_geodesic(spec, p, v, l);
        built = true;
      } catch (const NumericError&) {
        l *= 0.5;
      }
    }
    if (!built) continue;

    std::string phi_src;
    for (int a = 0; a < std::min(d, 3); ++a)
      phi_src += (a ? " + " : "") + float17(rng.uniform_in(-1.0, 1.0)) +
                 (a % 2 ? "*cos(x" : "*sin(x") + std::to_string(random_var(rng, d)) + ")";
    dsl::Expression phi = dsl::Expression::parse(phi_src);

    std::vector<dsl::Expression> V;
    for (int a = 0; a < d; ++a) {
      std::string s = float17(rng.uniform_in(-0.5, 0.5));
      s += " + " + float17(rng.uniform_in(-0.5, 0.5)) + "*x" +
           std::to_string(random_var(rng, d));
      s += " + " + float17(rng.uniform_in(-0.25, 0.25)) + "*x" +
           std::to_string(random_var(rng, d)) + "*x" + std::to_string(random_var(rng, d));
      V.push_back(dsl::Expression::parse(s));
    }

    const Profile prof = Profile::sin_pi(path.length());
    LemmaCheck gc = gradient_lemma_check(spec, phi, path, prof);
    LemmaCheck lc = lie_lemma_check(spec, V, path, prof);
    out.min_margin_gradient = std::min(out.min_margin_gradient, gc.rhs - gc.lhs);
    out.min_margin_lie = std::min(out.min_margin_lie, lc.rhs - lc.lhs);
    out.max_identity_defect =
        std::max({out.max_identity_defect, std::abs(gc.lhs - gc.identity_rhs),
                  std::abs(lc.lhs - lc.identity_rhs)});
    all_hold = all_hold && gc.holds && lc.holds;

    Json row = Json::object();
    row.set("case", Json::integer(done));
    row.set("length", Json::num(path.length()));
    Json gj = Json::object();
    gj.set("lhs", Json::num(gc.lhs));
    gj.set("rhs", Json::num(gc.rhs));
    gj.set("identity_rhs", Json::num(gc.identity_rhs));
    gj.set("c_measured", Json::num(gc.c_measured));
    gj.set("holds", Json::boolean(gc.holds));
    row.set("gradient", gj);
    Json lj = Json::object();
    lj.set("lhs", Json::num(lc.lhs));
    lj.set("rhs", Json::num(lc.rhs));
    lj.set("rhs_printed", Json::num(lc.rhs_printed));
    lj.set("identity_rhs", Json::num(lc.identity_rhs));
    lj.set("c_measured", Json::num(lc.c_measured));
    lj.set("holds", Json::boolean(lc.holds));
    lj.set("holds_printed", Json::boolean(lc.holds_printed));
    row.set("lie", lj);
    out.rows.push(row);
    ++done;
  }

  if (done < cases) {
    out.verdict = "FAIL";
    return out;
  }
  out.verdict = all_hold ? "PASS" : "FAIL";
  return out;
}

// ---- diameter ----

DiameterOutcome diameter_outcome(const ManifoldSpec& spec, ComparisonModel model,
                                 const dsl::Expression* phi,
                                 const std::vector<dsl::Expression>* Z, int pairs,
                                 std::uint64_t seed) {
  if (pairs < 1) throw ConfigError("diameter: pairs must be positive");
  DiameterOutcome out;
  out.pairs = pairs;
  out.scan = measure_hypotheses(spec, model, phi, Z, std::max(200, pairs), seed);
  if (!out.scan.ok) {
    out.verdict = "NOT-APPLICABLE";
    out.reason = out.scan.reason;
    return out;
  }
  if (out.scan.ric_perp_vacuous) {
    out.verdict = "NOT-APPLICABLE";
    out.reason = "orthogonal Ricci hypothesis vacuous (structure span exhausts the tangent space)";
    return out;
  }
  if (model.flavor == Flavor::GradientBoundedPhi && phi != nullptr &&
      out.scan.c_measured > 0.0 &&
      out.scan.phi_sup_radius >= 0.95 * out.scan.max_chart_radius) {
    out.verdict = "NOT-APPLICABLE";
    out.reason = "sup |phi| attained at the sampling boundary (unbounded potential)";
    return out;
  }

  model.k = out.scan.k_admissible;
  if (model.flavor == Flavor::GradientBoundedPhi) model.C = out.scan.c_measured;
  model.validate();
  out.bound = diameter_bound(model);

  Rng root(seed);
  double best = 0.0;
  Vec best_a, best_b;
  for (int i = 0; i < pairs; ++i) {
    Rng rng = root.fork(0xD1A00000ull + static_cast<std::uint64_t>(i));
    Vec a = sample_point(spec, rng);
    Vec b = sample_point(spec, rng);
    double dist;
    if (spec.closed_distance) {
      dist = spec.closed_distance(a, b);
    } else {
      try {
        dist = distance(spec, a, b).distance;
      } catch (const NumericError&) {
        ++out.failures;
        continue;
      }
    }
    if (dist > best) {
      best = dist;
      best_a = a;
      best_b = b;
    }
  }
  if (out.failures * 20 > pairs)
    throw NumericError("diameter: distance failures beyond 5% of pairs");

  // Local refinement by coordinate ascent over both endpoints; affordable
  // only with a closed-form distance.
  if (spec.closed_distance && best > 0.0) {
    for (double step : {0.08, 0.02, 0.005}) {
      bool improved = true;
      int sweeps = 0;
      while (improved && sweeps++ < 40) {
        improved = false;
        for (int e = 0; e < 2; ++e)
          for (int cidx = 0; cidx < spec.dim; ++cidx)
            for (double sgn : {1.0, -1.0}) {
              Vec ca = best_a, cb = best_b;
              Vec& target = e == 0 ? ca : cb;
              target[cidx] += sgn * step;
              if (spec.domain(target.data()) <= 0.0) continue;
              const double cd = spec.closed_distance(ca, cb);
              if (cd > best) {
                best = cd;
                best_a = ca;
                best_b = cb;
                improved = true;
              }
            }
      }
    }
  }

  out.estimate = best;
  out.sharpness = best / out.bound;
  out.holds = best <= out.bound + 1e-3;
  out.verdict = out.holds ? "PASS" : "FAIL";
  if (!out.holds) out.reason = "diameter estimate exceeds the bound";
  return out;
}

// ---- small-r limit ----

LimitOutcome small_r_limit(const ManifoldSpec& spec, std::uint64_t seed) {
  LimitOutcome out;
  const int d = spec.dim;
  switch (spec.kind) {
    case StructureKind::Kahler: out.expected = d - 2; break;
    case StructureKind::Quaternionic: out.expected = d - 4; break;
    case StructureKind::None: out.expected = d - 1; break;
  }
  Rng root(seed);
  Rng brng = root.fork(0xBA5Eu);
  const Vec base = radial_base(spec, brng);
  const Mat g = spec.metric_values(base.data());
  // h chosen so r = 0.05 and r = 0.1 land exactly on grid nodes.
  const double h = 2.5e-4;
  std::vector<double> exts;
  for (int j = 0; j < 3; ++j) {
    Rng rng = root.fork(static_cast<std::uint64_t>(j));
    Vec v = sample_unit(spec, g, rng);
    RadialTable tab = radial_table(spec, base, v, 0.12, h);
    const int i1 = tab.index_at(0.1);
    const int i2 = tab.index_at(0.05);
    const double A1 = tab.t[static_cast<std::size_t>(i1)] *
                      tab.orthogonal[static_cast<std::size_t>(i1)];
    const double A2 = tab.t[static_cast<std::size_t>(i2)] *
                      tab.orthogonal[static_cast<std::size_t>(i2)];
    exts.push_back((4.0 * A2 - A1) / 3.0);
    if (j == 0) {
      for (std::size_t s = 0; s < tab.t.size(); ++s) {
        if (!(tab.t[s] > 0.0) || !std::isfinite(tab.orthogonal[s])) continue;
        out.r.push_back(tab.t[s]);
        out.value.push_back(tab.t[s] * tab.orthogonal[s]);
      }
    }
  }
  double mean = 0.0;
  for (double e : exts) mean += e;
  mean /= static_cast<double>(exts.size());
  for (double e : exts)
    out.max_direction_spread = std::max(out.max_direction_spread, std::abs(e - mean));
  out.extrapolated = mean;
  out.verdict = std::abs(mean - out.expected) < 1e-3 ? "PASS" : "FAIL";
  return out;
}

// ---- config-driven suites ----

namespace {

ComparisonModel model_for_spec(const ManifoldSpec& spec, const Config& cfg) {
  ComparisonModel m = comparison_model_from_config(cfg);
  if (!cfg.has("comparison.kind")) {
    if (spec.kind == StructureKind::None)
      throw ConfigError("comparison experiments need a structured manifold");
    m.kind = spec.kind;
  } else if (m.kind != spec.kind) {
    throw ConfigError("comparison.kind does not match the manifold structure");
  }
  const int n_spec = structure_dim(spec.kind, spec.dim);
  if (!cfg.has("comparison.n"))
    m.n = n_spec;
  else if (m.n != n_spec)
    throw ConfigError("comparison.n does not match the manifold");
  m.validate();
  return m;
}

std::unique_ptr<dsl::Expression> phi_from_config(const Config& cfg, int dim) {
  if (!cfg.has("comparison.phi")) return nullptr;
  auto e = std::make_unique<dsl::Expression>(
      dsl::Expression::parse(cfg.get_str("comparison.phi")));
  if (e->max_var() > dim)
    throw ConfigError("comparison.phi references a variable beyond the manifold dimension");
  return e;
}

std::unique_ptr<std::vector<dsl::Expression>> z_from_config(const Config& cfg, int dim) {
  bool any = false;
  for (int a = 1; a <= dim; ++a) any = any || cfg.has("comparison.Z" + std::to_string(a));
  if (!any) return nullptr;
  auto z = std::make_unique<std::vector<dsl::Expression>>();
  for (int a = 1; a <= dim; ++a) {
    dsl::Expression e =
        dsl::Expression::parse(cfg.get_str("comparison.Z" + std::to_string(a), "0"));
    if (e.max_var() > dim)
      throw ConfigError("comparison.Z components reference a variable beyond the dimension");
    z->push_back(e);
  }
  return z;
}

Json series_json(const ComparisonSweep& sw) {
  Json s = Json::object();
  s.set("r", Json::num_array(sw.r));
  s.set("lhs", Json::num_array(sw.lhs));
  s.set("rhs", Json::num_array(sw.rhs));
  s.set("margin", Json::num_array(sw.margin));
  s.set("rhs_printed", Json::num_array(sw.rhs_printed));
  s.set("margin_printed", Json::num_array(sw.margin_printed));
  return s;
}

std::string flavor_name(Flavor f) {
  switch (f) {
    case Flavor::GradientBoundedPhi: return "gradient_bounded_phi";
    case Flavor::GradientRiccati: return "gradient_riccati";
    case Flavor::NonGradientMZ: return "non_gradient_mZ";
  }
  return "?";
}

}  // namespace

ExperimentResult verify_bochner(const Config& cfg) {
  const ManifoldSpec spec = resolve_manifold(cfg);
  const int samples = static_cast<int>(cfg.get_int("samples", 50));
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));
  BochnerOutcome oc = bochner_outcome(spec, samples, seed);

  ExperimentResult res;
  res.verdict = oc.verdict;
  Json& r = res.report;
  r.set("experiment", Json::str("bochner"));
  r.set("manifold", Json::str(spec.name));
  Json plan = Json::object();
  plan.set("samples", Json::integer(samples));
  plan.set("seed", Json::integer(static_cast<long long>(seed)));
  plan.set("mode", Json::str(oc.flat_mode ? "flat-polynomial" : "radial"));
  plan.set("tolerance", Json::num(oc.tol));
  r.set("plan", plan);
  Json agg = Json::object();
  agg.set("collected", Json::integer(static_cast<long long>(oc.residuals.size())));
  agg.set("max_residual", Json::num(oc.max_residual));
  agg.set("residual_q50", Json::num(percentile(oc.residuals, 0.5)));
  agg.set("residual_q90", Json::num(percentile(oc.residuals, 0.9)));
  if (oc.flat_mode) agg.set("max_perm_spread", Json::num(oc.max_perm_spread));
  if (std::isfinite(oc.min_modified_margin))
    agg.set("min_modified_margin", Json::num(oc.min_modified_margin));
  agg.set("vacuous", Json::boolean(oc.any_vacuous));
  r.set("aggregates", agg);
  r.set("per_term", oc.per_term);
  if (!oc.reason.empty()) r.set("reason", Json::str(oc.reason));
  r.set("verdict", Json::str(res.verdict));
  return res;
}

ExperimentResult verify_comparison(const Config& cfg) {
  const ManifoldSpec spec = resolve_manifold(cfg);
  const ComparisonModel model = model_for_spec(spec, cfg);
  const auto phi = phi_from_config(cfg, spec.dim);
  const auto Z = z_from_config(cfg, spec.dim);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));
  const double r_min = cfg.get_num("comparison.r_min", 0.1);
  const double r_max = cfg.get_num("comparison.r_max", 1.4);
  const int r_points = static_cast<int>(cfg.get_int("comparison.r_points", 20));
  const int directions = static_cast<int>(cfg.get_int("comparison.directions", 8));
  const int hyp_samples = static_cast<int>(cfg.get_int("comparison.hyp_samples", 200));
  const bool use_measured_k = cfg.get_bool("comparison.use_measured_k", true);

  Rng brng(seed ^ 0x9e3779b97f4a7c15ull);
  const Vec base = radial_base(spec, brng);
  ComparisonSweep sw = comparison_sweep(spec, model, base, linspace(r_min, r_max, r_points),
                                        directions, Z.get(), phi.get(), hyp_samples, seed,
                                        use_measured_k);

  ExperimentResult res;
  Json& r = res.report;
  r.set("experiment", Json::str("comparison"));
  r.set("manifold", Json::str(spec.name));
  Json plan = Json::object();
  plan.set("flavor", Json::str(flavor_name(model.flavor)));
  plan.set("m_eff", Json::num(model.m_eff()));
  plan.set("n", Json::integer(model.n));
  plan.set("r_min", Json::num(r_min));
  plan.set("r_max", Json::num(r_max));
  plan.set("r_points", Json::integer(r_points));
  plan.set("directions", Json::integer(directions));
  plan.set("seed", Json::integer(static_cast<long long>(seed)));
  plan.set("use_measured_k", Json::boolean(use_measured_k));
  r.set("plan", plan);
  r.set("measured", sw.scan.to_json());
  r.set("k_used", Json::num(sw.model.k));
  if (!sw.r.empty()) r.set("series", series_json(sw));
  Json agg = Json::object();
  agg.set("worst_margin", Json::num(sw.worst_margin));
  agg.set("equality", Json::boolean(sw.equality));
  agg.set("dropped_beyond_barrier", Json::integer(sw.dropped_beyond_barrier));
  r.set("aggregates", agg);
  if (!sw.reason.empty()) r.set("note", Json::str(sw.reason));

  bool any_fail = sw.verdict == "FAIL";

  if (cfg.get_bool("comparison.riccati", true) && model.dperp() >= 1) {
    const int cases = static_cast<int>(cfg.get_int("comparison.riccati_cases", 10));
    RiccatiSweep rs = riccati_sweep(model, cases, seed);
    Json rj = Json::object();
    rj.set("cases", rs.rows);
    rj.set("min_slack", Json::num(rs.min_slack));
    rj.set("blowdown_closed", Json::num(rs.blowdown_closed));
    rj.set("blowdown_ode", Json::num(rs.blowdown_ode));
    rj.set("verdict", Json::str(rs.verdict));
    r.set("riccati", rj);
    any_fail = any_fail || rs.verdict == "FAIL";
  }

  if (cfg.get_bool("comparison.lemmas", true)) {
    const int cases = static_cast<int>(cfg.get_int("comparison.lemma_cases", 10));
    LemmaSweep ls = lemma_sweep(spec, cases, seed);
    Json lj = Json::object();
    lj.set("cases", ls.rows);
    lj.set("min_margin_gradient", Json::num(ls.min_margin_gradient));
    lj.set("min_margin_lie", Json::num(ls.min_margin_lie));
    lj.set("max_identity_defect", Json::num(ls.max_identity_defect));
    lj.set("verdict", Json::str(ls.verdict));
    r.set("lemmas", lj);
    any_fail = any_fail || ls.verdict == "FAIL";
  }

  if (cfg.get_bool("comparison.canary", false)) {
    const ManifoldSpec canary = conformal_canary(spec);
    Rng cbrng(seed ^ 0xC0FFEEull);
    const Vec cbase = radial_base(canary, cbrng);
    ComparisonSweep cs =
        comparison_sweep(canary, model, cbase, linspace(0.4, 0.8, 5), directions, Z.get(),
                         phi.get(), hyp_samples, seed);
    Json cj = Json::object();
    cj.set("manifold", Json::str(canary.name));
    cj.set("measured", cs.scan.to_json());
    cj.set("k_used", Json::num(cs.model.k));
    if (!cs.r.empty()) cj.set("series", series_json(cs));
    double margin_mid = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t s = 0; s < cs.r.size(); ++s)
      if (std::abs(cs.r[s] - 0.6) < 0.02) margin_mid = cs.margin[s];
    cj.set("margin_at_0p6", Json::num(margin_mid));
    const bool canary_ok = std::isfinite(margin_mid) && margin_mid > 0.01;
    cj.set("verdict", Json::str(canary_ok ? "PASS" : "FAIL"));
    r.set("canary", cj);
    any_fail = any_fail || !canary_ok;
  }

  res.verdict = any_fail ? "FAIL" : sw.verdict;
  r.set("verdict", Json::str(res.verdict));
  return res;
}

ExperimentResult verify_diameter(const Config& cfg) {
  const ManifoldSpec spec = resolve_manifold(cfg);
  const ComparisonModel model = model_for_spec(spec, cfg);
  const auto phi = phi_from_config(cfg, spec.dim);
  const auto Z = z_from_config(cfg, spec.dim);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));
  const int pairs = static_cast<int>(cfg.get_int("diameter.pairs", 200));
  DiameterOutcome oc = diameter_outcome(spec, model, phi.get(), Z.get(), pairs, seed);

  ExperimentResult res;
  res.verdict = oc.verdict;
  Json& r = res.report;
  r.set("experiment", Json::str("diameter"));
  r.set("manifold", Json::str(spec.name));
  Json plan = Json::object();
  plan.set("flavor", Json::str(flavor_name(model.flavor)));
  plan.set("pairs", Json::integer(pairs));
  plan.set("seed", Json::integer(static_cast<long long>(seed)));
  r.set("plan", plan);
  r.set("measured", oc.scan.to_json());
  Json agg = Json::object();
  agg.set("estimate", Json::num(oc.estimate));
  agg.set("bound", Json::num(oc.bound));
  agg.set("sharpness", Json::num(oc.sharpness));
  agg.set("holds", Json::boolean(oc.holds));
  agg.set("failures", Json::integer(oc.failures));
  r.set("aggregates", agg);
  if (!oc.reason.empty()) r.set("reason", Json::str(oc.reason));
  r.set("verdict", Json::str(res.verdict));
  return res;
}

ExperimentResult verify_limits(const Config& cfg) {
  const ManifoldSpec spec = resolve_manifold(cfg);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));
  LimitOutcome oc = small_r_limit(spec, seed);

  ExperimentResult res;
  res.verdict = oc.verdict;
  Json& r = res.report;
  r.set("experiment", Json::str("limits"));
  r.set("manifold", Json::str(spec.name));
  Json plan = Json::object();
  plan.set("seed", Json::integer(static_cast<long long>(seed)));
  plan.set("radii", Json::num_array({0.05, 0.1}));
  r.set("plan", plan);
  Json agg = Json::object();
  agg.set("expected", Json::num(oc.expected));
  agg.set("extrapolated", Json::num(oc.extrapolated));
  agg.set("max_direction_spread", Json::num(oc.max_direction_spread));
  r.set("aggregates", agg);
  Json series = Json::object();
  series.set("r", Json::num_array(oc.r));
  series.set("r_lap_perp", Json::num_array(oc.value));
  r.set("series", series);
  r.set("verdict", Json::str(res.verdict));
  return res;
}

ExperimentResult verify_structure(const Config& cfg) {
  std::vector<std::string> names;
  const bool selected = cfg.has("manifold") || cfg.has("manifold.dim");
  if (selected)
    names.push_back(resolve_manifold(cfg).name);
  else
    names = catalog_names();
  const int samples = static_cast<int>(cfg.get_int("samples", 25));
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));

  ExperimentResult res;
  Json& r = res.report;
  r.set("experiment", Json::str("structure"));
  Json rows = Json::array();
  bool all_ok = true;
  for (const std::string& name : names) {
    const ManifoldSpec spec = selected ? resolve_manifold(cfg) : catalog_entry(name);
    Json row = Json::object();
    row.set("manifold", Json::str(spec.name));
    row.set("dim", Json::integer(spec.dim));
    row.set("kind", Json::str(spec.kind == StructureKind::Kahler ? "kahler"
                              : spec.kind == StructureKind::Quaternionic ? "quaternionic"
                                                                         : "none"));
    bool ok = true;
    if (spec.kind != StructureKind::None) {
      StructureCheck sc = structure_check(spec, samples, seed);
      row.set("alg_residual", Json::num(sc.alg_residual));
      row.set("parallel_residual", Json::num(sc.parallel_residual));
      row.set("min_eigenvalue", Json::num(sc.min_eigenvalue));
      ok = ok && sc.pass();
    }
    IdentityScan id = riemann_identity_scan(spec, samples, seed);
    row.set("sym", Json::num(id.sym));
    row.set("bianchi", Json::num(id.bianchi));
    row.set("j_invariance", Json::num(id.j_invariance));
    ok = ok && id.sym < 1e-8 && id.bianchi < 1e-8 && id.j_invariance < 1e-8;
    row.set("ok", Json::boolean(ok));
    rows.push(row);
    all_ok = all_ok && ok;
  }
  r.set("entries", rows);
  res.verdict = all_ok ? "PASS" : "FAIL";
  r.set("verdict", Json::str(res.verdict));
  return res;
}

}  // namespace orthocurv
