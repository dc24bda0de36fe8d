#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vsclab/experiments.hpp"

namespace vsclab {

struct ProfileGrid {
  double rMin = 1e-3;
  double rMax = 1e3;
  double pointsPerDecade = 5.0;
};

struct SweepConfig {
  double deltaMin = 1e-4;
  double deltaMax = 1e-1;
  double pointsPerDecade = 5.0;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::vector<NoiseMode> modes{NoiseMode::RandomUnit, NoiseMode::TopSingular};
  double c1 = 1.0;
  double c2 = 1.0;
};

/// One experiment file: problem instance, profile grid, sweep and output directory.
struct RunConfig {
  ProblemSpec problem;
  ProfileGrid profile;
  SweepConfig sweep;
  std::string output = "out";
};

/// Parses the JSON text of a run configuration. Unknown keys, wrong types and
/// out-of-range values raise ConfigError naming the offending field.
RunConfig parseRunConfig(const std::string& text);
RunConfig loadRunConfig(const std::string& path);

}  // namespace vsclab
