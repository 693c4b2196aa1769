#pragma once

// Picard orbits, displacement decay and geometric iteration bounds.

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "afp/cyclic.hpp"

namespace afp {

struct SolveConfig {
  double epsilon = 0.01;
  double x0 = 0.0;
  std::size_t max_iter = 1'000'000;
  double divergence_factor = 1e3;
  /// Subset x0 is taken from; the first subset containing x0 when empty.
  std::optional<std::size_t> start_set;
};

struct IterationBound {
  double rate = 0.0;
  double delta0 = 0.0;
  double epsilon = 0.0;
  std::size_t n_star = 0;
};

enum class SolveOutcome { Hit, NoHit, Diverged };
const char* outcome_name(SolveOutcome o) noexcept;

struct SolveTrace {
  std::size_t k = 1;
  double epsilon = 0.0;
  std::vector<double> iterates;       // x_n, aligned with displacements
  std::vector<std::size_t> sets;      // subset index of x_n
  std::vector<double> displacements;  // Δ_n, or Δ^k_n for power solves
  std::vector<double> decay_ratios;   // Δ_{n+1} / Δ_n
  std::optional<std::size_t> hit_index;
  SolveOutcome outcome = SolveOutcome::NoHit;
  std::optional<IterationBound> bound;
};

/// G(x, Tx, Tx) + G(Tx, x, x), with T applied as from `from_set`.
double displacement(const GSpace& space, const CyclicMap& map, double x,
                    std::optional<std::size_t> from_set = std::nullopt);

/// Iterates x_{n+1} = T(x_n) until Δ_n < ε, Δ_n > divergence_factor·Δ_0, or
/// max_iter displacements have been evaluated. Throws OrbitError when an
/// iterate leaves the subset it should land in, and DomainError when x0 is off
/// the domain.
SolveTrace picard_solve(const GSpace& space, const CyclicMap& map, const SolveConfig& config);

/// Same orbit, displacement measured k steps apart:
/// Δ^k_n = G(x_n, x_{n+k}, x_{n+k}) + G(x_{n+k}, x_n, x_n).
SolveTrace power_solve(const GSpace& space, const CyclicMap& map, std::size_t k, const SolveConfig& config);

/// Smallest n ≥ 0 with rate^n · delta0 < epsilon, by repeated
/// multiplication. Throws ParameterError unless 0 < rate < 1.
IterationBound iteration_bound(double delta0, double epsilon, double rate);

/// Attaches iteration_bound(Δ_0, ε, rate) to a nonempty trace.
void attach_bound(SolveTrace& trace, double rate);

/// Columns n,x_n,delta_n,ratio_n; ratio_n = Δ_n/Δ_{n-1}, empty for n = 0.
void write_trace_csv(std::ostream& out, const SolveTrace& trace);

}  // namespace afp
