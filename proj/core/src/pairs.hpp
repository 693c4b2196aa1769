#pragma once

// Cross-pair enumeration shared by classification and the combined-class
// check.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "afp/cyclic.hpp"

namespace afp::detail {

/// Grid points of one subset and their images under T.
struct SetImages {
  std::vector<double> xs;
  std::vector<double> txs;
};

std::vector<SetImages> grid_images(const CyclicMap& map, const GridPlan& plan);

struct PairSweep {
  std::size_t examined = 0;
  bool exhaustive = true;
};

/// Calls `visit(i, a, b)` for x = sets[i].xs[a], y = sets[i+1].xs[b]. Every
/// pair when the total fits in `budget`, otherwise `budget` uniform draws
/// from a generator seeded with `seed`.
PairSweep sweep_pairs(const std::vector<SetImages>& sets, std::size_t budget, std::uint64_t seed,
                      const std::function<void(std::size_t, std::size_t, std::size_t)>& visit);

double ratio_of(const GSpace& space, OperatorClass cls, double x, double tx, double y, double ty, double tol);

}  // namespace afp::detail
