#pragma once

// Problem files: sets, the cyclical map, class parameters and run settings.
//
//   [space]   m, X1..Xm, metric
//   [map]     map = <expr>  |  branch = <guard> : <expr> (repeated), default = <expr>
//   [params]  class, alpha, beta, gamma
//   [run]     epsilon, grid, max_points, x0, max_iter, divergence_factor, budget, seed
//
// The full grammar lives in docs/spec-grammar.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "afp/classes.hpp"
#include "afp/expr.hpp"
#include "afp/space.hpp"

namespace afp {

/// A constant kept together with the expression it was written as, so that
/// `1/3` survives a round trip as `1 / 3`.
struct Scalar {
  Expr expr;
  double value = 0.0;

  static Scalar of(double v) { return {Expr::constant(v), v}; }
  static Scalar of(Expr e);

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.expr == b.expr; }
};

/// Branch selector: an explicit interval, or membership in X_i (0-based).
struct SetGuard {
  std::size_t index = 0;
  friend bool operator==(const SetGuard&, const SetGuard&) = default;
};
using Guard = std::variant<Interval, SetGuard>;

struct Branch {
  Guard guard;
  Expr body;
  friend bool operator==(const Branch&, const Branch&) = default;
};

/// Ordered branches plus an optional default. A map given as a single
/// expression has no branches and only the default.
struct PiecewiseDef {
  std::vector<Branch> branches;
  std::optional<Expr> fallback;

  bool is_single_expression() const noexcept { return branches.empty() && fallback.has_value(); }
  friend bool operator==(const PiecewiseDef&, const PiecewiseDef&) = default;
};

struct SolverDefaults {
  std::optional<double> x0;
  std::size_t max_iter = 1'000'000;
  double divergence_factor = 1e3;
  friend bool operator==(const SolverDefaults&, const SolverDefaults&) = default;
};

struct ProblemSpec {
  std::size_t m = 0;
  std::vector<RealSubset> subsets;
  GMetricDef gmetric;
  PiecewiseDef map;
  /// Class the declared parameters belong to, when stated.
  std::optional<OperatorClass> declared_class;
  std::optional<Scalar> alpha;
  std::optional<Scalar> beta;
  std::optional<Scalar> gamma;
  std::vector<double> epsilons;
  GridPlan grid;
  SolverDefaults solver;
  std::size_t budget = 4'000'000;
  std::uint64_t seed = 42;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

inline constexpr long kDefaultFamilyKMax = 1000;

/// Throws ParseError (syntax: line/column; semantic: key) on bad input.
ProblemSpec parse_spec(std::string_view text);
ProblemSpec load_spec(const std::filesystem::path& path);

/// Canonical text: fixed section and key order, every run key spelled out.
std::string serialize_spec(const ProblemSpec& spec);

}  // namespace afp
