#include "afp/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "afp/engine.hpp"
#include "afp/error.hpp"

namespace afp {

FixedPointSet enumerate_fset(const GSpace& space, const CyclicMap& map, double epsilon, const GridPlan& plan) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive, got " + format_number(epsilon));
  FixedPointSet fset;
  fset.epsilon = epsilon;
  fset.grid_size = union_grid(space, plan).size();
  for (std::size_t i = 0; i < map.size(); ++i) {
    for (double x : discretize(map.domain().subset(i), plan)) {
      if (displacement(space, map, x, i) < epsilon) fset.members.push_back(x);
    }
  }
  std::sort(fset.members.begin(), fset.members.end());
  fset.members.erase(std::unique(fset.members.begin(), fset.members.end(),
                                 [](double a, double b) { return std::abs(a - b) <= kDefaultTol; }),
                     fset.members.end());
  return fset;
}

Diameters set_diameter(const GSpace& space, const FixedPointSet& fset, std::size_t triple_budget, std::uint64_t seed) {
  const auto& pts = fset.members;
  if (pts.empty()) throw DomainError("diameter of an empty set");
  Diameters d;
  if (pts.size() == 1) return d;

  if (space.gmetric().is_builder()) {
    // On the line both builder shapes peak at a triple drawn from the two
    // extremes, and d_G is monotone in |x - y|.
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
    d.delta_pair = derived_metric(space, *lo, *hi);
    d.delta_triple = std::max(eval_g(space, *lo, *hi, *hi), eval_g(space, *lo, *lo, *hi));
    return d;
  }

  const std::size_t n = pts.size();
  const double triples = static_cast<double>(n) * n * n;
  if (triples <= static_cast<double>(triple_budget)) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        d.delta_pair = std::max(d.delta_pair, derived_metric(space, pts[a], pts[b]));
        for (std::size_t c = 0; c < n; ++c) d.delta_triple = std::max(d.delta_triple, eval_g(space, pts[a], pts[b], pts[c]));
      }
    }
    return d;
  }

  d.approximate = true;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t s = 0; s < triple_budget; ++s) {
    const double x = pts[pick(rng)], y = pts[pick(rng)], z = pts[pick(rng)];
    d.delta_pair = std::max(d.delta_pair, derived_metric(space, x, y));
    d.delta_triple = std::max(d.delta_triple, eval_g(space, x, y, z));
  }
  return d;
}

double diameter_bound(OperatorClass cls, const ClassParams& params, double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive, got " + format_number(epsilon));
  switch (cls) {
    case OperatorClass::GMohseni: {
      validate_params(cls, params);
      const double a = params.alpha;
      return 2.0 * epsilon * (1.0 + a) / (1.0 - 2.0 * a);
    }
    case OperatorClass::GMohsenialhosseini: {
      validate_params(cls, params);
      const double eta = params.eta();
      if (eta >= 1.0) throw ParameterError("diameter bound needs eta < 1, got " + format_number(eta));
      return 2.0 * epsilon * (1.0 + eta) / (1.0 - eta);
    }
    case OperatorClass::GMohseniSemi: {
      validate_params(cls, params);
      const double a = params.alpha;
      return epsilon * (2.0 + a) / (1.0 - a);
    }
    case OperatorClass::GAlphaPlain:
    case OperatorClass::GChatterjea: break;
  }
  throw UnsupportedClassError(std::string("no diameter bound for ") + class_name(cls));
}

DiameterReport verify_diameter(const GSpace& space, const CyclicMap& map, OperatorClass cls, const ClassParams& params,
                               double epsilon, const GridPlan& plan, std::size_t triple_budget, std::uint64_t seed) {
  DiameterReport r;
  r.cls = cls;
  r.params = params;
  r.epsilon = epsilon;
  r.bound = diameter_bound(cls, params, epsilon);
  const FixedPointSet fset = enumerate_fset(space, map, epsilon, plan);
  r.members = fset.members.size();
  if (fset.members.empty()) {
    r.empty = true;
    r.pass = true;
    return r;
  }
  r.measured = set_diameter(space, fset, triple_budget, seed);
  r.pass = r.measured.delta_pair <= r.bound + kDiameterMargin && r.measured.delta_triple <= r.bound + kDiameterMargin;
  return r;
}

}  // namespace afp
