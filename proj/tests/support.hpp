#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "afp/cyclic.hpp"
#include "afp/spec.hpp"

namespace afp::testing {

inline std::string spec_path(const std::string& name) { return std::string(AFP_SPEC_DIR) + "/" + name + ".afp"; }
inline std::string golden_path(const std::string& rel) { return std::string(AFP_GOLDEN_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ProblemSpec bundled(const std::string& name) { return load_spec(spec_path(name)); }

// Space and map of a bundled spec kept together; CyclicMap owns its own copy
// of the space.
struct Loaded {
  ProblemSpec spec;
  CyclicMap map;
  const GSpace& space() const { return map.domain(); }
};

inline Loaded load(const std::string& name) {
  ProblemSpec spec = bundled(name);
  CyclicMap map = map_from(spec);
  return {std::move(spec), std::move(map)};
}

}  // namespace afp::testing
