#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "orthocurv/config.hpp"
#include "orthocurv/dsl.hpp"
#include "orthocurv/jet.hpp"
#include "orthocurv/util.hpp"

namespace orthocurv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class StructureKind { None, Kahler, Quaternionic };

// Structure dimension: d/2 complex for Kahler, d/4 quaternionic.
int structure_dim(StructureKind k, int d);
// Number of structure endomorphisms carried (1 = J, 3 = I,J,K).
int structure_count(StructureKind k);

// Metric evaluator: fills g as packed upper-triangular jets (i <= j, row-major,
// d(d+1)/2 entries) of the requested order at chart point x.
using MetricFn = std::function<void(const double* x, int order, std::vector<Jet>& g)>;
// Structure evaluator: fills endomorphism `which` (0 = J or I, 1 = J, 2 = K) as
// d*d row-major jets: (S X)^a = S[a*d+b] X^b.
using StructFn = std::function<void(const double* x, int which, int order, std::vector<Jet>& s)>;
// Chart guard: positive inside the valid chart region; used to clamp
// experiments, not to silently clip results.
using DomainFn = std::function<double(const double* x)>;

// Hermitian potential form of a Kahler metric for the Chern-route cross-check:
// entries g_{i jbar} as real/imaginary DSL parts in the interleaved real chart.
struct HermitianForm {
  int n = 0;  // complex dimension
  std::vector<dsl::Expression> re, im;  // n*n row-major
  bool present() const { return n > 0; }
};

struct Anchors {
  double einstein_c = std::numeric_limits<double>::quiet_NaN();
  double sectional_anchor = std::numeric_limits<double>::quiet_NaN();  // H or Q when constant
  double ric_perp_anchor = std::numeric_limits<double>::quiet_NaN();   // Ric^perp(v,v) when constant
  double k_model = std::numeric_limits<double>::quiet_NaN();           // comparison normalization
  double inj_hint = std::numeric_limits<double>::infinity();
  double diameter = std::numeric_limits<double>::quiet_NaN();
};

struct ManifoldSpec {
  std::string name;
  int dim = 0;
  StructureKind kind = StructureKind::None;
  MetricFn metric;
  StructFn structure;                       // null iff kind == None
  DomainFn domain;                          // always set (flats: large box)
  std::vector<dsl::Expression> metric_dsl;  // optional textual twin, d*d row-major
  HermitianForm hermitian;                  // optional, Kahler catalog entries
  Anchors anchors;
  // Optional closed-form geodesic distance (projective arccos formulas etc.),
  // cross-validated against the shooting route in tests; used where experiment
  // budgets cannot afford shooting.
  std::function<double(const Vec&, const Vec&)> closed_distance;
  // Optional exact volume-weighted chart sampler (falls back to rejection).
  std::function<Vec(Rng&)> volume_sample;

  // Convenience: metric jets at x.
  std::vector<Jet> metric_jets(const double* x, int order) const {
    std::vector<Jet> g;
    metric(x, order, g);
    return g;
  }
  Mat metric_values(const double* x) const;
  std::vector<Jet> structure_jets(const double* x, int which, int order) const {
    std::vector<Jet> s;
    structure(x, which, order, s);
    return s;
  }
  Mat structure_values(const double* x, int which) const;
};

// Built-in manifolds. Names: flat-c1 flat-c2 flat-c3 flat-h1 flat-h2 s2-polar
// cp1 cp2 cp3 cp1xcp1 hp1 hp2.
std::vector<std::string> catalog_names();
ManifoldSpec catalog_entry(const std::string& name);  // ConfigError if unknown

// User-defined manifold from config keys:
//   manifold.dim, manifold.kind = kahler|quaternionic|none,
//   manifold.g11, manifold.g12, ... (upper triangle, DSL),
//   manifold.structure = standard (default) | dsl (+ manifold.J11, ...).
ManifoldSpec manifold_from_config(const Config& cfg);

// Resolves either a catalog name or config-defined manifold.
ManifoldSpec resolve_manifold(const Config& cfg);

}  // namespace orthocurv
