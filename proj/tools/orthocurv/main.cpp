#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orthocurv/curvature.hpp"
#include "orthocurv/experiments.hpp"
#include "orthocurv/geodesic.hpp"
#include "orthocurv/report.hpp"
#include "orthocurv/sde.hpp"

namespace oc = orthocurv;

namespace {

// ---- config plumbing ----

// One CLI flag bound to a config key; only flags the user actually passed
// are merged (flags win over the config file).
struct Binding {
  CLI::Option* opt = nullptr;
  std::string key;
  std::string value;
  bool is_flag = false;
};

// Deque: CLI11 binds each option to its Binding's value address, so elements
// must never relocate as more flags are registered.
struct Flags {
  std::deque<Binding> bindings;

  CLI::Option* opt(CLI::App* cmd, const std::string& name, const std::string& key,
                   const std::string& desc) {
    bindings.push_back({});
    Binding& b = bindings.back();
    b.key = key;
    b.opt = cmd->add_option(name, b.value, desc);
    return b.opt;
  }
  CLI::Option* flag(CLI::App* cmd, const std::string& name, const std::string& key,
                    const std::string& desc) {
    bindings.push_back({});
    Binding& b = bindings.back();
    b.key = key;
    b.is_flag = true;
    b.opt = cmd->add_flag(name, desc);
    return b.opt;
  }
  void merge_into(oc::Config& cfg) const {
    for (const Binding& b : bindings)
      if (b.opt->count() > 0) cfg.set(b.key, b.is_flag ? "true" : b.value);
  }
};

const std::vector<std::string> kManifoldKeys = {
    "manifold",          "manifold.dim",      "manifold.kind",
    "manifold.structure", "manifold.chart_radius", "manifold.inj_hint"};
const std::vector<std::string> kModelKeys = {"comparison.kind", "comparison.flavor",
                                             "comparison.k",    "comparison.n",
                                             "comparison.C",    "comparison.m",
                                             "comparison.phi"};
const std::vector<std::string> kSweepKeys = {
    "comparison.r_min",       "comparison.r_max",        "comparison.r_points",
    "comparison.directions",  "comparison.hyp_samples",  "comparison.use_measured_k",
    "comparison.riccati",     "comparison.riccati_cases", "comparison.lemmas",
    "comparison.lemma_cases", "comparison.canary"};
const std::vector<std::string> kRhoKeys = {"sde.rho0",      "sde.T",        "sde.dt",
                                           "sde.paths",     "sde.barrier",  "sde.eps_floor",
                                           "sde.drift_off", "sde.fan_points"};

bool digits_only(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// Unknown keys are configuration errors (no silent typo tolerance). Indexed
// families (metric/structure entries, drift components) match by prefix.
void check_keys(const oc::Config& cfg, const std::set<std::string>& allowed) {
  static const std::vector<std::string> prefixes = {"manifold.g", "manifold.J",
                                                    "comparison.Z"};
  for (const auto& kv : cfg.items()) {
    if (allowed.count(kv.first)) continue;
    bool ok = false;
    for (const std::string& p : prefixes)
      if (kv.first.size() > p.size() && kv.first.compare(0, p.size(), p) == 0 &&
          digits_only(kv.first.substr(p.size())))
        ok = true;
    if (!ok) throw oc::ConfigError("unknown config key: " + kv.first);
  }
}

std::set<std::string> allowed_union(std::initializer_list<std::vector<std::string>> groups,
                                    std::initializer_list<std::string> extra) {
  std::set<std::string> s;
  for (const auto& g : groups) s.insert(g.begin(), g.end());
  s.insert(extra);
  return s;
}

std::string out_path(const std::string& out_dir, const std::string& fname) {
  return (std::filesystem::path(out_dir) / fname).string();
}

int emit_report(const oc::Config& cfg, const std::string& out_dir, const std::string& fname,
                oc::Json doc, const std::string& verdict) {
  doc.set("config", oc::config_echo(cfg));
  const std::string path = out_path(out_dir, fname);
  oc::write_text_file(path, oc::finalize_report(std::move(doc)));
  if (verdict.empty()) {
    std::printf("WROTE %s\n", path.c_str());
    return 0;
  }
  std::printf("%s %s\n", verdict.c_str(), path.c_str());
  return oc::verdict_exit(verdict);
}

oc::Vec parse_vec(const std::string& csv, int dim, const std::string& what) {
  std::vector<double> vals;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (cur.empty()) throw oc::ConfigError(what + ": empty component");
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cur, &used));
        if (used != cur.size()) throw std::invalid_argument(cur);
      } catch (const std::exception&) {
        throw oc::ConfigError(what + ": bad number '" + cur + "'");
      }
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (static_cast<int>(vals.size()) != dim)
    throw oc::ConfigError(what + ": expected " + std::to_string(dim) + " components, got " +
                          std::to_string(vals.size()));
  oc::Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = vals[static_cast<std::size_t>(i)];
  return v;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string safe_name(const oc::Config& cfg) {
  if (cfg.has("manifold")) return cfg.get_str("manifold");
  if (cfg.has("manifold.dim")) return "custom";
  return "all";
}

// ---- commands ----

int cmd_curvature(const oc::Config& cfg, const std::string& out_dir) {
  const oc::ManifoldSpec spec = oc::resolve_manifold(cfg);
  const int d = spec.dim;
  oc::Vec p = oc::Vec::Zero(d);
  if (cfg.has("curvature.point")) p = parse_vec(cfg.get_str("curvature.point"), d, "--point");
  if (spec.domain(p.data()) <= 0.0)
    throw oc::ConfigError("--point lies outside the chart domain");
  const oc::Curvature c = oc::curvature_at(spec, p.data());

  oc::Json doc = oc::Json::object();
  doc.set("command", oc::Json::str("curvature"));
  doc.set("manifold", oc::Json::str(spec.name));
  doc.set("dim", oc::Json::integer(d));
  doc.set("point", oc::Json::num_array(std::vector<double>(p.data(), p.data() + d)));
  auto mat_json = [d](const oc::Mat& m) {
    oc::Json rows = oc::Json::array();
    for (int i = 0; i < d; ++i) {
      std::vector<double> row(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = m(i, j);
      rows.push(oc::Json::num_array(row));
    }
    return rows;
  };
  doc.set("g", mat_json(c.g));
  doc.set("ricci", mat_json(c.ricci));
  doc.set("scalar", oc::Json::num(c.scalar));
  double max_gamma = 0.0, max_riem = 0.0;
  for (double v : c.gamma) max_gamma = std::max(max_gamma, std::abs(v));
  for (double v : c.riemann) max_riem = std::max(max_riem, std::abs(v));
  doc.set("max_abs_christoffel", oc::Json::num(max_gamma));
  doc.set("max_abs_riemann", oc::Json::num(max_riem));
  const oc::EinsteinFit fit = oc::einstein_fit(c);
  oc::Json ef = oc::Json::object();
  ef.set("constant", oc::Json::num(fit.c));
  ef.set("max_deviation", oc::Json::num(fit.residual));
  doc.set("einstein_fit", ef);

  if (cfg.has("curvature.dir")) {
    oc::Vec v = parse_vec(cfg.get_str("curvature.dir"), d, "--dir");
    const double nrm = c.norm(v);
    if (nrm < 1e-12) throw oc::ConfigError("--dir: zero direction");
    v /= nrm;
    oc::Json dir = oc::Json::object();
    dir.set("unit_dir", oc::Json::num_array(std::vector<double>(v.data(), v.data() + d)));
    dir.set("ricci_vv", oc::Json::num(v.dot(c.ricci * v)));
    if (spec.kind != oc::StructureKind::None) {
      dir.set(spec.kind == oc::StructureKind::Kahler ? "H" : "Q",
              oc::Json::num(oc::structure_sectional(spec, c, v)));
      const oc::RicPerp rp = oc::orthogonal_ricci(spec, c, v);
      dir.set("ric_perp", oc::Json::num(rp.via_decomposition));
      dir.set("ric_perp_frame_sum", oc::Json::num(rp.via_frame_sum));
    }
    doc.set("direction", dir);
  }

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          rows.push_back({static_cast<double>(i + 1), static_cast<double>(j + 1),
                          static_cast<double>(k + 1), static_cast<double>(l + 1),
                          c.riem(i, j, k, l)});
  const std::string csv_path = out_path(out_dir, "curvature_" + spec.name + "_riemann.csv");
  oc::write_text_file(csv_path, oc::csv_table({"i", "j", "k", "l", "R_ijkl"}, rows));
  doc.set("riemann_csv", oc::Json::str(csv_path));
  return emit_report(cfg, out_dir, "curvature_" + spec.name + ".json", std::move(doc), "");
}

int cmd_verify(const std::string& which, const oc::Config& cfg, const std::string& out_dir) {
  oc::ExperimentResult res;
  if (which == "bochner")
    res = oc::verify_bochner(cfg);
  else if (which == "comparison")
    res = oc::verify_comparison(cfg);
  else if (which == "diameter")
    res = oc::verify_diameter(cfg);
  else if (which == "limits")
    res = oc::verify_limits(cfg);
  else
    res = oc::verify_structure(cfg);
  return emit_report(cfg, out_dir, "verify_" + which + "_" + safe_name(cfg) + ".json",
                     std::move(res.report), res.verdict);
}

oc::DiffusionConfig rho_config(const oc::Config& cfg) {
  oc::DiffusionConfig dc;
  dc.model = oc::comparison_model_from_config(cfg);
  dc.rho0 = cfg.get_num("sde.rho0", dc.rho0);
  dc.T = cfg.get_num("sde.T", dc.T);
  dc.dt = cfg.get_num("sde.dt", dc.dt);
  dc.paths = cfg.get_int("sde.paths", dc.paths);
  dc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));
  dc.barrier = cfg.get_num("sde.barrier", dc.barrier);
  dc.eps_floor = cfg.get_num("sde.eps_floor", dc.eps_floor);
  dc.drift_off = cfg.get_bool("sde.drift_off", false);
  dc.threads = static_cast<int>(cfg.get_int("threads", 1));
  return dc;
}

int cmd_simulate_rho(const oc::Config& cfg, const std::string& out_dir) {
  const oc::DiffusionConfig dc = rho_config(cfg);
  const oc::DiffusionEnsemble ens = oc::simulate_rho(dc);
  const oc::BoundaryReport br = oc::boundary_classification(dc.model);

  oc::Json doc = oc::Json::object();
  doc.set("command", oc::Json::str("simulate_rho"));
  oc::Json plan = oc::Json::object();
  plan.set("rho0", oc::Json::num(dc.rho0));
  plan.set("T", oc::Json::num(dc.T));
  plan.set("dt", oc::Json::num(dc.dt));
  plan.set("paths", oc::Json::integer(dc.paths));
  plan.set("seed", oc::Json::integer(static_cast<long long>(dc.seed)));
  plan.set("barrier", oc::Json::num(dc.resolved_barrier()));
  plan.set("drift_off", oc::Json::boolean(dc.drift_off));
  doc.set("plan", plan);
  oc::Json agg = oc::Json::object();
  agg.set("hits", oc::Json::integer(ens.hits));
  agg.set("underflows", oc::Json::integer(ens.underflows));
  agg.set("max_rho", oc::Json::num(ens.max_rho));
  agg.set("mean_terminal", oc::Json::num(ens.mean_terminal));
  agg.set("var_terminal", oc::Json::num(ens.var_terminal));
  agg.set("min_dt_eff", oc::Json::num(ens.min_dt_eff));
  agg.set("mean_steps", oc::Json::num(ens.mean_steps));
  agg.set("ensemble_hash", oc::Json::str(hash_hex(ens.content_hash)));
  doc.set("aggregates", agg);
  auto endpoint_json = [](const oc::EndpointClass& e) {
    oc::Json j = oc::Json::object();
    j.set("class", oc::Json::str(e.cls));
    j.set("accessible", oc::Json::boolean(e.accessible));
    j.set("sigma", oc::Json::num_array({e.sigma[0], e.sigma[1], e.sigma[2]}));
    j.set("n", oc::Json::num_array({e.nval[0], e.nval[1], e.nval[2]}));
    j.set("sigma_increment_ratio", oc::Json::num(e.sigma_ratio));
    j.set("n_increment_ratio", oc::Json::num(e.n_ratio));
    return j;
  };
  oc::Json bnd = oc::Json::object();
  bnd.set("left_end", oc::Json::num(br.left_end));
  bnd.set("right_end", oc::Json::num(br.right_end));
  bnd.set("left", endpoint_json(br.left));
  bnd.set("right", endpoint_json(br.right));
  doc.set("boundary", bnd);
  return emit_report(cfg, out_dir, "simulate_rho.json", std::move(doc), "");
}

int cmd_simulate_manifold(const oc::Config& cfg, const std::string& out_dir) {
  const oc::ManifoldSpec spec = oc::resolve_manifold(cfg);
  oc::ManifoldDiffusionConfig mc;
  mc.T = cfg.get_num("sde.T", mc.T);
  mc.dt = cfg.get_num("sde.dt", mc.dt);
  mc.paths = cfg.get_int("sde.paths", mc.paths);
  mc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));
  mc.n_dist = static_cast<int>(cfg.get_int("sde.n_dist", mc.n_dist));
  mc.threads = static_cast<int>(cfg.get_int("threads", 1));
  bool any_z = false;
  for (int a = 1; a <= spec.dim; ++a)
    any_z = any_z || cfg.has("comparison.Z" + std::to_string(a));
  if (any_z)
    for (int a = 1; a <= spec.dim; ++a)
      mc.Z.push_back(oc::dsl::Expression::parse(
          cfg.get_str("comparison.Z" + std::to_string(a), "0")));
  oc::Rng rng(mc.seed ^ 0xBA5Eu);
  mc.p = oc::Vec::Zero(spec.dim);
  if (spec.domain(mc.p.data()) <= 0.0) mc.p = oc::sample_point(spec, rng);
  mc.q = cfg.has("sde.start") ? parse_vec(cfg.get_str("sde.start"), spec.dim, "sde.start")
                              : oc::sample_point(spec, rng);
  const oc::ManifoldEnsemble ens = oc::manifold_diffusion(spec, mc);

  oc::Json doc = oc::Json::object();
  doc.set("command", oc::Json::str("simulate_manifold"));
  doc.set("manifold", oc::Json::str(spec.name));
  oc::Json plan = oc::Json::object();
  plan.set("T", oc::Json::num(mc.T));
  plan.set("dt", oc::Json::num(mc.dt));
  plan.set("paths", oc::Json::integer(mc.paths));
  plan.set("seed", oc::Json::integer(static_cast<long long>(mc.seed)));
  plan.set("start",
           oc::Json::num_array(std::vector<double>(mc.q.data(), mc.q.data() + spec.dim)));
  plan.set("drift", oc::Json::boolean(!mc.Z.empty()));
  doc.set("plan", plan);
  oc::Json agg = oc::Json::object();
  agg.set("exits", oc::Json::integer(ens.exits));
  agg.set("max_r", oc::Json::num(ens.max_r));
  agg.set("mean_sq_disp", oc::Json::num(ens.mean_sq_disp));
  agg.set("valid", oc::Json::boolean(ens.valid));
  agg.set("ensemble_hash", oc::Json::str(hash_hex(ens.content_hash)));
  doc.set("aggregates", agg);
  return emit_report(cfg, out_dir, "simulate_manifold_" + spec.name + ".json", std::move(doc),
                     "");
}

int cmd_catalog() {
  std::printf("%-10s %3s  %-12s %-10s %9s %9s %9s\n", "name", "dim", "kind", "validated",
              "einstein", "anchor", "diameter");
  for (const std::string& name : oc::catalog_names()) {
    const oc::ManifoldSpec spec = oc::catalog_entry(name);
    const char* kind = spec.kind == oc::StructureKind::Kahler         ? "kahler"
                       : spec.kind == oc::StructureKind::Quaternionic ? "quaternionic"
                                                                      : "none";
    std::string status = "-";
    if (spec.kind != oc::StructureKind::None)
      status = oc::structure_check(spec, 10, 1).pass() ? "pass" : "FAIL";
    std::printf("%-10s %3d  %-12s %-10s %9.4g %9.4g %9.4g\n", spec.name.c_str(), spec.dim,
                kind, status.c_str(), spec.anchors.einstein_c,
                spec.anchors.sectional_anchor, spec.anchors.diameter);
  }
  return 0;
}

int cmd_plotdata_comparison(const oc::Config& cfg, const std::string& out_dir) {
  const oc::ManifoldSpec spec = oc::resolve_manifold(cfg);
  oc::ComparisonModel model = oc::comparison_model_from_config(cfg);
  if (!cfg.has("comparison.kind")) model.kind = spec.kind;
  if (!cfg.has("comparison.n")) model.n = oc::structure_dim(spec.kind, spec.dim);
  model.validate();
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));
  const double r_min = cfg.get_num("comparison.r_min", 0.1);
  const double r_max = cfg.get_num("comparison.r_max", 1.4);
  const int r_points = static_cast<int>(cfg.get_int("comparison.r_points", 20));
  const int directions = static_cast<int>(cfg.get_int("comparison.directions", 8));
  oc::Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  oc::Vec base = oc::Vec::Zero(spec.dim);
  if (spec.domain(base.data()) <= 0.0) base = oc::sample_point(spec, rng);
  // Plot series are drawn at the configured model constants (no hypothesis
  // gate); verify comparison is the verdict-bearing path.
  const oc::ComparisonSweep sw =
      oc::comparison_sweep(spec, model, base, oc::linspace(r_min, r_max, r_points),
                           directions, nullptr, nullptr, 8, seed, false);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < sw.r.size(); ++i)
    rows.push_back({sw.r[i], sw.lhs[i], sw.rhs[i], sw.margin[i]});
  const std::string path = out_path(out_dir, "plotdata_comparison_" + spec.name + ".csv");
  oc::write_text_file(path, oc::csv_table({"r", "lhs", "rhs", "margin"}, rows));
  std::printf("WROTE %s\n", path.c_str());
  return 0;
}

int cmd_plotdata_rho(const oc::Config& cfg, const std::string& out_dir) {
  const oc::DiffusionConfig dc = rho_config(cfg);
  const int n_times = static_cast<int>(cfg.get_int("sde.fan_points", 200));
  const oc::RhoFan fan = oc::simulate_rho_fan(dc, n_times);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < fan.t.size(); ++i)
    rows.push_back({fan.t[i], fan.quantiles[i][0], fan.quantiles[i][1], fan.quantiles[i][2],
                    fan.quantiles[i][3], fan.quantiles[i][4]});
  const std::string path = out_path(out_dir, "plotdata_rho.csv");
  oc::write_text_file(path, oc::csv_table({"t", "q05", "q25", "q50", "q75", "q95"}, rows));
  std::printf("WROTE %s\n", path.c_str());
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"orthocurv: chart-based curvature, comparison, and diffusion toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = std::getenv("ORTHOCURV_OUT") ? std::getenv("ORTHOCURV_OUT") : ".";

  Flags fl;
  auto common = [&](CLI::App* cmd, bool with_out = true) {
    cmd->add_option("--config", config_path, "config file (key = value; flags win)");
    if (with_out) cmd->add_option("--out", out_dir, "output directory (env ORTHOCURV_OUT)");
    fl.opt(cmd, "--seed", "seed", "root RNG seed");
    fl.opt(cmd, "--threads", "threads", "worker threads (results are thread-invariant)");
  };
  auto manifold_opt = [&](CLI::App* cmd) {
    fl.opt(cmd, "--manifold", "manifold", "catalog manifold name");
  };
  auto model_opts = [&](CLI::App* cmd) {
    fl.opt(cmd, "--k", "comparison.k", "curvature scale k > 0");
    fl.opt(cmd, "--m", "comparison.m", "effective dimension (0: real dimension)");
    fl.opt(cmd, "--C", "comparison.C", "potential/drift bound C >= 0");
    fl.opt(cmd, "--n", "comparison.n", "structure dimension");
    fl.opt(cmd, "--kind", "comparison.kind", "kahler | quaternionic");
    fl.opt(cmd, "--flavor", "comparison.flavor",
           "gradient_bounded_phi | gradient_riccati | non_gradient_mZ");
    fl.opt(cmd, "--phi", "comparison.phi", "potential phi as a DSL expression");
  };

  CLI::App* curvature = app.add_subcommand("curvature", "curvature report at a chart point");
  common(curvature);
  manifold_opt(curvature);
  fl.opt(curvature, "--point", "curvature.point", "chart point, comma-separated");
  fl.opt(curvature, "--dir", "curvature.dir", "tangent direction, comma-separated");

  CLI::App* verify = app.add_subcommand("verify", "run a verification experiment");
  verify->require_subcommand(1);
  const std::vector<std::string> suites = {"bochner", "comparison", "diameter", "limits",
                                           "structure"};
  for (const std::string& s : suites) {
    CLI::App* cmd = verify->add_subcommand(s, "verify " + s);
    common(cmd);
    manifold_opt(cmd);
    if (s == "bochner" || s == "structure")
      fl.opt(cmd, "--samples", "samples", "sample count");
    if (s == "comparison" || s == "diameter") model_opts(cmd);
    if (s == "comparison") {
      fl.opt(cmd, "--r-min", "comparison.r_min", "sweep radius lower end");
      fl.opt(cmd, "--r-max", "comparison.r_max", "sweep radius upper end");
      fl.opt(cmd, "--r-points", "comparison.r_points", "sweep grid size");
      fl.opt(cmd, "--directions", "comparison.directions", "radial directions");
      fl.opt(cmd, "--hyp-samples", "comparison.hyp_samples", "hypothesis scan samples");
      fl.flag(cmd, "--canary", "comparison.canary", "run the conformal-perturbation canary");
    }
    if (s == "diameter") fl.opt(cmd, "--pairs", "diameter.pairs", "sampled point pairs");
  }

  CLI::App* simulate = app.add_subcommand("simulate", "stochastic simulations");
  simulate->require_subcommand(1);
  CLI::App* sim_rho = simulate->add_subcommand("rho", "radial comparison diffusion");
  common(sim_rho);
  model_opts(sim_rho);
  fl.opt(sim_rho, "--rho0", "sde.rho0", "initial radius");
  fl.opt(sim_rho, "--T", "sde.T", "time horizon");
  fl.opt(sim_rho, "--dt", "sde.dt", "base step");
  fl.opt(sim_rho, "--paths", "sde.paths", "ensemble size");
  fl.opt(sim_rho, "--barrier", "sde.barrier", "absorbing barrier (0: comparison barrier)");
  fl.opt(sim_rho, "--eps-floor", "sde.eps_floor", "reflection floor near 0");
  fl.flag(sim_rho, "--drift-off", "sde.drift_off", "disable the comparison drift");
  CLI::App* sim_man = simulate->add_subcommand("manifold", "chart diffusion on a manifold");
  common(sim_man);
  manifold_opt(sim_man);
  fl.opt(sim_man, "--T", "sde.T", "time horizon");
  fl.opt(sim_man, "--dt", "sde.dt", "base step");
  fl.opt(sim_man, "--paths", "sde.paths", "ensemble size");
  fl.opt(sim_man, "--n-dist", "sde.n_dist", "distance decimation stride");
  fl.opt(sim_man, "--start", "sde.start", "start point, comma-separated");

  CLI::App* catalog = app.add_subcommand("catalog", "list built-in manifolds");
  (void)catalog;

  CLI::App* plotdata = app.add_subcommand("plotdata", "CSV series for external plotting");
  plotdata->require_subcommand(1);
  CLI::App* plot_cmp = plotdata->add_subcommand("comparison", "r, lhs, rhs, margin series");
  common(plot_cmp);
  manifold_opt(plot_cmp);
  model_opts(plot_cmp);
  fl.opt(plot_cmp, "--r-min", "comparison.r_min", "sweep radius lower end");
  fl.opt(plot_cmp, "--r-max", "comparison.r_max", "sweep radius upper end");
  fl.opt(plot_cmp, "--r-points", "comparison.r_points", "sweep grid size");
  fl.opt(plot_cmp, "--directions", "comparison.directions", "radial directions");
  CLI::App* plot_rho = plotdata->add_subcommand("rho", "rho-path quantile fan");
  common(plot_rho);
  model_opts(plot_rho);
  fl.opt(plot_rho, "--rho0", "sde.rho0", "initial radius");
  fl.opt(plot_rho, "--T", "sde.T", "time horizon");
  fl.opt(plot_rho, "--dt", "sde.dt", "base step");
  fl.opt(plot_rho, "--paths", "sde.paths", "ensemble size");
  fl.opt(plot_rho, "--barrier", "sde.barrier", "absorbing barrier (0: comparison barrier)");
  fl.opt(plot_rho, "--eps-floor", "sde.eps_floor", "reflection floor near 0");
  fl.flag(plot_rho, "--drift-off", "sde.drift_off", "disable the comparison drift");
  fl.opt(plot_rho, "--fan-points", "sde.fan_points", "checkpoint count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  oc::Config cfg;
  if (!config_path.empty()) cfg = oc::Config::from_file(config_path);
  fl.merge_into(cfg);

  if (app.got_subcommand(catalog)) return cmd_catalog();

  if (app.got_subcommand(curvature)) {
    check_keys(cfg, allowed_union({kManifoldKeys},
                                  {"curvature.point", "curvature.dir", "seed", "threads"}));
    return cmd_curvature(cfg, out_dir);
  }
  if (app.got_subcommand(verify)) {
    for (const std::string& s : suites)
      if (verify->got_subcommand(s)) {
        if (s == "bochner" || s == "structure" || s == "limits")
          check_keys(cfg, allowed_union({kManifoldKeys}, {"samples", "seed", "threads"}));
        else if (s == "comparison")
          check_keys(cfg, allowed_union({kManifoldKeys, kModelKeys, kSweepKeys},
                                        {"seed", "threads"}));
        else
          check_keys(cfg, allowed_union({kManifoldKeys, kModelKeys},
                                        {"diameter.pairs", "seed", "threads"}));
        return cmd_verify(s, cfg, out_dir);
      }
  }
  if (app.got_subcommand(simulate)) {
    if (simulate->got_subcommand(sim_rho)) {
      check_keys(cfg, allowed_union({kModelKeys, kRhoKeys}, {"seed", "threads"}));
      return cmd_simulate_rho(cfg, out_dir);
    }
    check_keys(cfg, allowed_union({kManifoldKeys},
                                  {"sde.T", "sde.dt", "sde.paths", "sde.n_dist", "sde.start",
                                   "seed", "threads"}));
    return cmd_simulate_manifold(cfg, out_dir);
  }
  if (app.got_subcommand(plotdata)) {
    if (plotdata->got_subcommand(plot_cmp)) {
      check_keys(cfg, allowed_union({kManifoldKeys, kModelKeys, kSweepKeys},
                                    {"seed", "threads"}));
      return cmd_plotdata_comparison(cfg, out_dir);
    }
    check_keys(cfg, allowed_union({kModelKeys, kRhoKeys}, {"seed", "threads"}));
    return cmd_plotdata_rho(cfg, out_dir);
  }
  throw oc::ConfigError("no command selected");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const oc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const oc::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
