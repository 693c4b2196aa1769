#include "afp/cyclic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <tuple>

#include "afp/error.hpp"
#include "pairs.hpp"

namespace afp {

const char* class_name(OperatorClass c) noexcept {
  switch (c) {
    case OperatorClass::GAlphaPlain: return "GAlphaPlain";
    case OperatorClass::GMohseni: return "GMohseni";
    case OperatorClass::GChatterjea: return "GChatterjea";
    case OperatorClass::GMohsenialhosseini: return "GMohsenialhosseini";
    case OperatorClass::GMohseniSemi: return "GMohseniSemi";
  }
  return "?";
}

std::optional<OperatorClass> class_from_name(std::string_view name) {
  for (OperatorClass c : kAllClasses) {
    if (name == class_name(c)) return c;
  }
  return std::nullopt;
}

double class_upper_bound(OperatorClass c) noexcept {
  switch (c) {
    case OperatorClass::GAlphaPlain:
    case OperatorClass::GMohsenialhosseini: return 1.0;
    case OperatorClass::GMohseni:
    case OperatorClass::GChatterjea:
    case OperatorClass::GMohseniSemi: return 0.5;
  }
  return 0.0;
}

double ClassParams::eta() const {
  if (beta >= 1.0 || gamma >= 1.0) throw ParameterError("eta needs beta < 1 and gamma < 1");
  return std::max({alpha, beta / (1.0 - beta), gamma / (1.0 - gamma)});
}

// ---------------------------------------------------------------- maps

CyclicMap::CyclicMap(GSpace domain, PiecewiseDef body) : domain_(std::move(domain)), body_(std::move(body)) {
  if (body_.branches.empty() && !body_.fallback) throw DomainError("a map needs at least one branch or a default");
  for (const auto& b : body_.branches) {
    if (const auto* g = std::get_if<SetGuard>(&b.guard); g && g->index >= domain_.size()) {
      throw DomainError("branch guard refers to X" + std::to_string(g->index + 1) + " but only " +
                        std::to_string(domain_.size()) + " subsets exist");
    }
  }
}

GSpace space_from(const ProblemSpec& spec) { return GSpace(spec.subsets, spec.gmetric); }

CyclicMap map_from(const ProblemSpec& spec) { return CyclicMap(space_from(spec), spec.map); }

namespace {

bool guard_matches(const CyclicMap& map, const Guard& guard, double x, std::optional<std::size_t> from_set) {
  if (const auto* iv = std::get_if<Interval>(&guard)) return iv->contains(x);
  const std::size_t j = std::get<SetGuard>(guard).index;
  if (from_set) return *from_set % map.size() == j;
  return map.domain().subset(j).contains(x);
}

}  // namespace

double apply_map(const CyclicMap& map, double x, std::optional<std::size_t> from_set) {
  for (const auto& b : map.body().branches) {
    if (guard_matches(map, b.guard, x, from_set)) return b.body.eval_x(x);
  }
  if (map.body().fallback) return map.body().fallback->eval_x(x);
  throw UnmatchedPointError("no branch of the map accepts x=" + format_number(x), x);
}

CoverageReport check_coverage(const CyclicMap& map, const GridPlan& plan) {
  CoverageReport report;
  for (std::size_t i = 0; i < map.size(); ++i) {
    for (double x : discretize(map.domain().subset(i), plan)) {
      const auto matches = std::count_if(map.body().branches.begin(), map.body().branches.end(),
                                         [&](const Branch& b) { return guard_matches(map, b.guard, x, i); });
      if (matches == 0 && !map.body().fallback) report.unmatched.push_back(x);
      if (matches > 1) report.overlapping.push_back(x);
    }
  }
  return report;
}

CyclicityReport verify_cyclicity(const CyclicMap& map, const GridPlan& plan, double tol) {
  CyclicityReport report;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto grid = discretize(map.domain().subset(i), plan);
    report.points_checked.push_back(grid.size());
    const RealSubset& target = map.domain().subset(i + 1);
    for (double x : grid) {
      try {
        const double tx = apply_map(map, x, i);
        if (!target.contains(tx, tol)) report.violations.push_back({i, x, tx});
      } catch (const UnmatchedPointError&) {
        report.violations.push_back({i, x, std::nullopt});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------- ratios

namespace detail {

double ratio_of(const GSpace& space, OperatorClass cls, double x, double tx, double y, double ty, double tol) {
  const double num = derived_metric(space, tx, ty);
  double den = 0.0;
  switch (cls) {
    case OperatorClass::GAlphaPlain: den = derived_metric(space, x, y); break;
    case OperatorClass::GMohseni: den = derived_metric(space, x, y) + num; break;
    case OperatorClass::GChatterjea: den = derived_metric(space, x, ty) + derived_metric(space, y, tx); break;
    case OperatorClass::GMohseniSemi: den = derived_metric(space, x, y) + derived_metric(space, x, tx); break;
    case OperatorClass::GMohsenialhosseini:
      throw UnsupportedClassError("GMohsenialhosseini has no single pair ratio; use verify_mohsenialhosseini");
  }
  if (den < tol) return 0.0;
  return num / den;
}

std::vector<SetImages> grid_images(const CyclicMap& map, const GridPlan& plan) {
  std::vector<SetImages> out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    out[i].xs = discretize(map.domain().subset(i), plan);
    out[i].txs.reserve(out[i].xs.size());
    for (double x : out[i].xs) out[i].txs.push_back(apply_map(map, x, i));
  }
  return out;
}

PairSweep sweep_pairs(const std::vector<SetImages>& sets, std::size_t budget, std::uint64_t seed,
                      const std::function<void(std::size_t, std::size_t, std::size_t)>& visit) {
  if (budget == 0) throw ParameterError("pair budget must be at least 1");
  const std::size_t m = sets.size();
  std::vector<std::uint64_t> block(m);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    block[i] = static_cast<std::uint64_t>(sets[i].xs.size()) * sets[(i + 1) % m].xs.size();
    total += block[i];
  }
  if (total == 0) throw DomainError("no cross pairs: a subset grid is empty");

  PairSweep sweep;
  if (total <= budget) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t ny = sets[(i + 1) % m].xs.size();
      for (std::size_t a = 0; a < sets[i].xs.size(); ++a) {
        for (std::size_t b = 0; b < ny; ++b) visit(i, a, b);
      }
    }
    sweep.examined = static_cast<std::size_t>(total);
    sweep.exhaustive = true;
    return sweep;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
  for (std::size_t s = 0; s < budget; ++s) {
    std::uint64_t r = pick(rng);
    std::size_t i = 0;
    while (r >= block[i]) {
      r -= block[i];
      ++i;
    }
    const std::uint64_t ny = sets[(i + 1) % m].xs.size();
    visit(i, static_cast<std::size_t>(r / ny), static_cast<std::size_t>(r % ny));
  }
  sweep.examined = budget;
  sweep.exhaustive = false;
  return sweep;
}

}  // namespace detail

double pair_ratio(const GSpace& space, const CyclicMap& map, OperatorClass cls, double x, double y,
                  std::optional<std::size_t> x_set, double tol) {
  if (cls == OperatorClass::GMohsenialhosseini) {
    throw UnsupportedClassError("GMohsenialhosseini has no single pair ratio; use verify_mohsenialhosseini");
  }
  if (!x_set) x_set = map.domain().locate(x, tol);
  if (!x_set) throw DomainError("x=" + format_number(x) + " is not in any subset");
  const double tx = apply_map(map, x, *x_set);
  const double ty = apply_map(map, y, (*x_set + 1) % map.size());
  return detail::ratio_of(space, cls, x, tx, y, ty, tol);
}

namespace {

// Running maximum; ties go to the lexicographically smallest (x, y).
struct MaxTracker {
  double best = -std::numeric_limits<double>::infinity();
  PairWitness witness;

  void offer(double value, double x, double y, std::size_t x_set) {
    if (value > best || (value == best && std::tie(x, y) < std::tie(witness.x, witness.y))) {
      best = value;
      witness = {x, y, x_set};
    }
  }
};

double rate_transform(double r) { return r >= 1.0 ? std::numeric_limits<double>::infinity() : r / (1.0 - r); }

}  // namespace

double fitted_parameter(OperatorClass cls, double constant) {
  if (cls == OperatorClass::GMohsenialhosseini) return std::max(constant, 0.0);
  return std::max(constant, kAdmissibilityMargin);
}

ClassEstimate empirical_constant(const GSpace& space, const CyclicMap& map, OperatorClass cls, const GridPlan& plan,
                                 std::size_t budget, std::uint64_t seed) {
  if (cls == OperatorClass::GMohsenialhosseini) return fit_mohsenialhosseini(space, map, plan, budget, seed);
  const auto sets = detail::grid_images(map, plan);
  const std::size_t m = sets.size();
  MaxTracker tracker;
  const auto sweep = detail::sweep_pairs(sets, budget, seed, [&](std::size_t i, std::size_t a, std::size_t b) {
    const auto& from = sets[i];
    const auto& to = sets[(i + 1) % m];
    const double r = detail::ratio_of(space, cls, from.xs[a], from.txs[a], to.xs[b], to.txs[b], kDefaultTol);
    tracker.offer(r, from.xs[a], to.xs[b], i);
  });
  ClassEstimate est;
  est.cls = cls;
  est.constant = tracker.best;
  est.witness = tracker.witness;
  est.pairs_examined = sweep.examined;
  est.exhaustive = sweep.exhaustive;
  est.admissible = est.constant < class_upper_bound(cls) - kAdmissibilityMargin;
  return est;
}

ClassEstimate fit_mohsenialhosseini(const GSpace& space, const CyclicMap& map, const GridPlan& plan,
                                    std::size_t budget, std::uint64_t seed) {
  const auto sets = detail::grid_images(map, plan);
  const std::size_t m = sets.size();
  MaxTracker tracker;
  const auto sweep = detail::sweep_pairs(sets, budget, seed, [&](std::size_t i, std::size_t a, std::size_t b) {
    const auto& from = sets[i];
    const auto& to = sets[(i + 1) % m];
    const double x = from.xs[a], tx = from.txs[a], y = to.xs[b], ty = to.txs[b];
    const double r_alpha = detail::ratio_of(space, OperatorClass::GMohseni, x, tx, y, ty, kDefaultTol);
    const double r_gamma = detail::ratio_of(space, OperatorClass::GChatterjea, x, tx, y, ty, kDefaultTol);
    tracker.offer(std::min(r_alpha, rate_transform(r_gamma)), x, y, i);
  });
  ClassEstimate est;
  est.cls = OperatorClass::GMohsenialhosseini;
  est.constant = tracker.best;
  est.witness = tracker.witness;
  est.pairs_examined = sweep.examined;
  est.exhaustive = sweep.exhaustive;
  est.admissible = est.constant < 1.0 - kAdmissibilityMargin;
  if (est.admissible) {
    const double eta = fitted_parameter(OperatorClass::GMohsenialhosseini, est.constant);
    est.fitted = ClassParams{eta, 0.0, eta / (1.0 + eta)};
  }
  return est;
}

void validate_params(OperatorClass cls, const ClassParams& p) {
  auto in_open = [](double v, double hi) { return v > 0.0 && v < hi; };
  auto in_half_open = [](double v, double hi) { return v >= 0.0 && v < hi; };
  switch (cls) {
    case OperatorClass::GAlphaPlain:
      if (!in_open(p.alpha, 1.0)) throw ParameterError("GAlphaPlain needs alpha in (0, 1), got " + format_number(p.alpha));
      return;
    case OperatorClass::GMohseni:
    case OperatorClass::GChatterjea:
    case OperatorClass::GMohseniSemi:
      if (!in_open(p.alpha, 0.5)) {
        throw ParameterError(std::string(class_name(cls)) + " needs alpha in (0, 1/2), got " + format_number(p.alpha));
      }
      return;
    case OperatorClass::GMohsenialhosseini:
      if (!in_half_open(p.alpha, 1.0)) throw ParameterError("GMohsenialhosseini needs alpha in [0, 1), got " + format_number(p.alpha));
      if (!in_half_open(p.beta, 0.5)) throw ParameterError("GMohsenialhosseini needs beta in [0, 1/2), got " + format_number(p.beta));
      if (!in_half_open(p.gamma, 0.5)) throw ParameterError("GMohsenialhosseini needs gamma in [0, 1/2), got " + format_number(p.gamma));
      return;
  }
}

MohsenialhosseiniCheck verify_mohsenialhosseini(const GSpace& space, const CyclicMap& map, const ClassParams& params,
                                                const GridPlan& plan, std::size_t budget, std::uint64_t seed,
                                                double tol) {
  validate_params(OperatorClass::GMohsenialhosseini, params);
  MohsenialhosseiniCheck check;
  check.eta = params.eta();
  check.rate_condition = 3.0 * check.eta < 1.0;

  const auto sets = detail::grid_images(map, plan);
  const std::size_t m = sets.size();
  const auto sweep = detail::sweep_pairs(sets, budget, seed, [&](std::size_t i, std::size_t a, std::size_t b) {
    const auto& from = sets[i];
    const auto& to = sets[(i + 1) % m];
    const double x = from.xs[a], tx = from.txs[a], y = to.xs[b], ty = to.txs[b];
    const double lhs = derived_metric(space, tx, ty);
    const double bracket = derived_metric(space, x, y) + lhs;
    const double cross = derived_metric(space, x, ty) + derived_metric(space, y, tx);
    const bool ok = lhs <= params.alpha * bracket + tol || lhs <= params.beta * bracket + tol ||
                    lhs <= params.gamma * cross + tol;
    if (!ok) {
      ++check.failures;
      if (check.failing_pairs.size() < kMaxWitnesses) check.failing_pairs.push_back({x, y, i});
    }
  });
  check.pairs_examined = sweep.examined;
  check.holds = check.failures == 0;
  return check;
}

std::optional<double> contraction_rate(OperatorClass cls, const ClassParams& params) {
  validate_params(cls, params);
  double rate = 0.0;
  switch (cls) {
    case OperatorClass::GAlphaPlain: rate = params.alpha; break;
    case OperatorClass::GMohseni:
    case OperatorClass::GChatterjea: rate = params.alpha / (1.0 - params.alpha); break;
    case OperatorClass::GMohsenialhosseini: rate = 3.0 * params.eta(); break;
    case OperatorClass::GMohseniSemi: rate = 2.0 * params.alpha; break;
  }
  if (rate >= 1.0) return std::nullopt;
  return rate;
}

}  // namespace afp
