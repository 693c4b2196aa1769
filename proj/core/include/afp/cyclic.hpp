#pragma once

// Cyclical operators T with T(X_i) ⊆ X_{i+1} and their contraction classes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "afp/classes.hpp"
#include "afp/space.hpp"
#include "afp/spec.hpp"

namespace afp {

/// Margin applied to the open upper end of every parameter range.
inline constexpr double kAdmissibilityMargin = 1e-6;

/// Upper end of the class's parameter range (exclusive). For the combined
/// class this is the bound on alpha.
double class_upper_bound(OperatorClass c) noexcept;

struct ClassParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  /// max{alpha, beta/(1-beta), gamma/(1-gamma)}; requires beta, gamma < 1.
  double eta() const;
};

class CyclicMap {
 public:
  CyclicMap(GSpace domain, PiecewiseDef body);

  const GSpace& domain() const noexcept { return domain_; }
  const PiecewiseDef& body() const noexcept { return body_; }
  std::size_t size() const noexcept { return domain_.size(); }

 private:
  GSpace domain_;
  PiecewiseDef body_;
};

GSpace space_from(const ProblemSpec& spec);
CyclicMap map_from(const ProblemSpec& spec);

/// Value of the first matching branch. Interval guards match on
/// containment. A set guard `Xj` matches when `from_set == j`, or, with no
/// hint, when x ∈ Xj. Falls back to the default branch; throws
/// UnmatchedPointError otherwise.
double apply_map(const CyclicMap& map, double x, std::optional<std::size_t> from_set = std::nullopt);

struct CoverageReport {
  std::vector<double> unmatched;    // grid points no branch accepts
  std::vector<double> overlapping;  // grid points accepted by two or more branches
  bool pass() const { return unmatched.empty() && overlapping.empty(); }
};

/// Every grid point of every X_i must match exactly one branch (or the
/// default).
CoverageReport check_coverage(const CyclicMap& map, const GridPlan& plan);

struct CyclicityViolation {
  std::size_t from_set = 0;     // i, 0-based; the target is i+1 mod m
  double x = 0.0;
  std::optional<double> image;  // empty when no branch matched x
};

struct CyclicityReport {
  std::vector<std::size_t> points_checked;  // per subset
  std::vector<CyclicityViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Checks T(x) ∈ X_{i+1} for every grid point x of every X_i.
CyclicityReport verify_cyclicity(const CyclicMap& map, const GridPlan& plan, double tol = kDefaultTol);

/// Ratio whose supremum is the least admissible constant of the class, for
/// x ∈ X_i and y ∈ X_{i+1} (i = `x_set`, located when omitted). Returns 0 when
/// the denominator is below `tol`.
double pair_ratio(const GSpace& space, const CyclicMap& map, OperatorClass cls, double x, double y,
                  std::optional<std::size_t> x_set = std::nullopt, double tol = kDefaultTol);

struct PairWitness {
  double x = 0.0;
  double y = 0.0;
  std::size_t x_set = 0;
};

struct ClassEstimate {
  OperatorClass cls = OperatorClass::GAlphaPlain;
  double constant = 0.0;
  PairWitness witness;
  bool admissible = false;
  std::size_t pairs_examined = 0;
  bool exhaustive = true;
  /// Combined class only: fitted parameters reproducing `constant` as eta.
  std::optional<ClassParams> fitted;
};

/// Supremum of pair_ratio over cross pairs (x ∈ X_i grid, y ∈ X_{i+1} grid):
/// exhaustive when the pair count fits in `budget`, seeded uniform sampling
/// otherwise. Ties keep the lexicographically smallest witness.
ClassEstimate empirical_constant(const GSpace& space, const CyclicMap& map, OperatorClass cls, const GridPlan& plan,
                                 std::size_t budget, std::uint64_t seed);

/// Smallest eta for which every examined pair satisfies the alpha inequality
/// with alpha = eta or the gamma inequality with gamma = eta/(1+eta). Beta is
/// left at 0: its inequality has the same form as the alpha one.
ClassEstimate fit_mohsenialhosseini(const GSpace& space, const CyclicMap& map, const GridPlan& plan,
                                    std::size_t budget, std::uint64_t seed);

/// The parameter the class would use for an empirical constant: the constant
/// itself, floored at the admissibility margin for classes whose range
/// excludes zero.
double fitted_parameter(OperatorClass cls, double constant);

struct FailingPair {
  double x = 0.0;
  double y = 0.0;
  std::size_t x_set = 0;
};

struct MohsenialhosseiniCheck {
  bool holds = true;
  double eta = 0.0;
  bool rate_condition = false;  // 3·eta < 1
  std::size_t pairs_examined = 0;
  std::size_t failures = 0;
  std::vector<FailingPair> failing_pairs;  // first few
};

/// Per pair, at least one of the three combined-class inequalities must
/// hold. Throws ParameterError when alpha ∉ [0,1), beta ∉ [0,1/2) or
/// gamma ∉ [0,1/2).
MohsenialhosseiniCheck verify_mohsenialhosseini(const GSpace& space, const CyclicMap& map, const ClassParams& params,
                                                const GridPlan& plan, std::size_t budget, std::uint64_t seed,
                                                double tol = kDefaultTol);

/// Geometric factor per iteration implied by the class: alpha,
/// alpha/(1-alpha), alpha/(1-alpha), 3·eta, 2·alpha respectively. Empty when
/// that factor is ≥ 1. Throws ParameterError for parameters outside the
/// class range.
std::optional<double> contraction_rate(OperatorClass cls, const ClassParams& params);

/// Throws ParameterError unless `params` lie in the class's range.
void validate_params(OperatorClass cls, const ClassParams& params);

}  // namespace afp
