#pragma once

// The ε-fixed-point set on a grid, its diameter, and the closed-form bounds.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "afp/cyclic.hpp"

namespace afp {

struct FixedPointSet {
  double epsilon = 0.0;
  std::vector<double> members;  // ascending, distinct
  std::size_t grid_size = 0;    // distinct points examined
};

/// Grid points of every X_i whose displacement (T applied as from X_i) is
/// strictly below ε. A point shared by two subsets is a member when either
/// reading qualifies.
FixedPointSet enumerate_fset(const GSpace& space, const CyclicMap& map, double epsilon, const GridPlan& plan);

struct Diameters {
  double delta_triple = 0.0;  // max G(x, y, z) over members
  double delta_pair = 0.0;    // max d_G(x, y) over members
  bool approximate = false;   // sampled lower bound rather than exact
};

inline constexpr std::size_t kDefaultTripleBudget = 8'000'000;

/// Builder metrics reduce exactly to the two extreme members. Custom metrics
/// are enumerated exhaustively when |members|³ fits in `triple_budget`, and
/// sampled with `seed` otherwise. Throws DomainError on an empty set.
Diameters set_diameter(const GSpace& space, const FixedPointSet& fset, std::size_t triple_budget = kDefaultTripleBudget,
                       std::uint64_t seed = 42);

/// Closed-form diameter bound for GMohseni, GMohsenialhosseini and
/// GMohseniSemi. Throws UnsupportedClassError for the other classes and
/// ParameterError outside the class range.
double diameter_bound(OperatorClass cls, const ClassParams& params, double epsilon);

struct DiameterReport {
  OperatorClass cls = OperatorClass::GMohseni;
  ClassParams params;
  double epsilon = 0.0;
  double bound = 0.0;
  std::size_t members = 0;
  Diameters measured;
  bool empty = false;  // vacuous pass
  bool pass = false;
};

/// Margin allowed between a measured diameter and its bound.
inline constexpr double kDiameterMargin = 1e-9;

DiameterReport verify_diameter(const GSpace& space, const CyclicMap& map, OperatorClass cls, const ClassParams& params,
                               double epsilon, const GridPlan& plan, std::size_t triple_budget = kDefaultTripleBudget,
                               std::uint64_t seed = 42);

}  // namespace afp
