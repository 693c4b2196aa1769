#include "afp/engine.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "afp/error.hpp"

namespace afp {

const char* outcome_name(SolveOutcome o) noexcept {
  switch (o) {
    case SolveOutcome::Hit: return "hit";
    case SolveOutcome::NoHit: return "no_hit";
    case SolveOutcome::Diverged: return "diverged";
  }
  return "?";
}

double displacement(const GSpace& space, const CyclicMap& map, double x, std::optional<std::size_t> from_set) {
  return derived_metric(space, x, apply_map(map, x, from_set));
}

namespace {

void check_config(const SolveConfig& c) {
  if (!(c.epsilon > 0.0)) throw ParameterError("epsilon must be positive, got " + format_number(c.epsilon));
  if (c.max_iter == 0) throw ParameterError("max_iter must be at least 1");
  if (!(c.divergence_factor > 1.0)) throw ParameterError("divergence_factor must exceed 1");
}

std::size_t start_set_of(const CyclicMap& map, const SolveConfig& c) {
  if (c.start_set) {
    if (!map.domain().subset(*c.start_set).contains(c.x0)) {
      throw DomainError("x0=" + format_number(c.x0) + " is not in X" + std::to_string(*c.start_set % map.size() + 1));
    }
    return *c.start_set % map.size();
  }
  const auto s = map.domain().locate(c.x0);
  if (!s) throw DomainError("x0=" + format_number(c.x0) + " is not in any subset");
  return *s;
}

double image(const CyclicMap& map, double x, std::size_t s, std::size_t index) {
  try {
    return apply_map(map, x, s);
  } catch (const UnmatchedPointError& e) {
    throw OrbitError("iterate " + std::to_string(index) + ": " + e.what(), index, x);
  }
}

// Image of x_n must land in X_{s+1}; `index` is n + 1.
void check_landing(const CyclicMap& map, double tx, std::size_t s, std::size_t index, double x) {
  const std::size_t next = (s + 1) % map.size();
  if (!std::isfinite(tx) || !map.domain().subset(next).contains(tx)) {
    throw OrbitError("iterate " + std::to_string(index) + ": T(" + format_number(x) + ") = " + format_number(tx) +
                         " is not in X" + std::to_string(next + 1),
                     index, tx);
  }
}

void push_ratio(SolveTrace& t) {
  const std::size_t n = t.displacements.size();
  if (n < 2) return;
  const double prev = t.displacements[n - 2];
  t.decay_ratios.push_back(prev > 0.0 ? t.displacements[n - 1] / prev : 0.0);
}

}  // namespace

SolveTrace picard_solve(const GSpace& space, const CyclicMap& map, const SolveConfig& config) {
  check_config(config);
  SolveTrace trace;
  trace.epsilon = config.epsilon;
  double x = config.x0;
  std::size_t s = start_set_of(map, config);

  for (std::size_t n = 0; n < config.max_iter; ++n) {
    const double tx = image(map, x, s, n);
    const double d = derived_metric(space, x, tx);
    trace.iterates.push_back(x);
    trace.sets.push_back(s);
    trace.displacements.push_back(d);
    push_ratio(trace);
    if (d < config.epsilon) {
      trace.hit_index = n;
      trace.outcome = SolveOutcome::Hit;
      return trace;
    }
    if (d > config.divergence_factor * trace.displacements.front()) {
      trace.outcome = SolveOutcome::Diverged;
      return trace;
    }
    check_landing(map, tx, s, n + 1, x);
    x = tx;
    s = (s + 1) % map.size();
  }
  trace.outcome = SolveOutcome::NoHit;
  return trace;
}

SolveTrace power_solve(const GSpace& space, const CyclicMap& map, std::size_t k, const SolveConfig& config) {
  if (k == 0) throw ParameterError("k must be at least 1");
  check_config(config);
  SolveTrace trace;
  trace.k = k;
  trace.epsilon = config.epsilon;

  // Sliding window x_n .. x_{n+k} with their subset indices. The newest
  // point is checked for landing only when the orbit moves past it, as in
  // picard_solve.
  const std::size_t m = map.size();
  std::deque<double> xs{config.x0};
  std::deque<std::size_t> ss{start_set_of(map, config)};
  std::size_t produced = 0;  // index of xs.back()
  double preimage = config.x0;
  auto advance = [&] {
    if (produced > 0) check_landing(map, xs.back(), (ss.back() + m - 1) % m, produced, preimage);
    preimage = xs.back();
    xs.push_back(image(map, xs.back(), ss.back(), produced));
    ss.push_back((ss.back() + 1) % m);
    ++produced;
  };
  while (xs.size() < k + 1) advance();

  for (std::size_t n = 0; n < config.max_iter; ++n) {
    const double d = derived_metric(space, xs.front(), xs.back());
    trace.iterates.push_back(xs.front());
    trace.sets.push_back(ss.front());
    trace.displacements.push_back(d);
    push_ratio(trace);
    if (d < config.epsilon) {
      trace.hit_index = n;
      trace.outcome = SolveOutcome::Hit;
      return trace;
    }
    if (d > config.divergence_factor * trace.displacements.front()) {
      trace.outcome = SolveOutcome::Diverged;
      return trace;
    }
    advance();
    xs.pop_front();
    ss.pop_front();
  }
  trace.outcome = SolveOutcome::NoHit;
  return trace;
}

IterationBound iteration_bound(double delta0, double epsilon, double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw ParameterError("rate must lie in (0, 1), got " + format_number(rate));
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!(delta0 >= 0.0) || !std::isfinite(delta0)) throw ParameterError("delta0 must be finite and nonnegative");
  IterationBound b{rate, delta0, epsilon, 0};
  double v = delta0;
  while (v >= epsilon) {
    v *= rate;
    ++b.n_star;
  }
  return b;
}

void attach_bound(SolveTrace& trace, double rate) {
  if (trace.displacements.empty()) throw DomainError("cannot bound an empty trace");
  trace.bound = iteration_bound(trace.displacements.front(), trace.epsilon, rate);
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  out << "n,x_n,delta_n,ratio_n\n";
  for (std::size_t n = 0; n < trace.displacements.size(); ++n) {
    out << n << ',' << format_number(trace.iterates[n]) << ',' << format_number(trace.displacements[n]) << ',';
    if (n > 0) out << format_number(trace.decay_ratios[n - 1]);
    out << '\n';
  }
}

}  // namespace afp
