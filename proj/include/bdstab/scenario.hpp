#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bdstab/drift_model.hpp"

namespace bdstab {

struct FlowSettings {
  double h0 = 1e-2;
  double rtol = 1e-10;
  double atol = 1e-12;
  double kappa = 1e-3;   // inner ball radius
  double r_max = 1e3;    // escape radius
  double t_max = 1e3;    // time budget per trajectory
  std::size_t mesh = 720;  // directions in 2D
  int icosphere_level = 4;  // 3D mesh: 2562-vertex icosphere
  double unstable_margin = 1.05;
  // Steps never shrink below this fraction of |u| / |delta|; across a
  // discontinuity of the field they are accepted at that size.
  double min_step_fraction = 1e-3;
  unsigned threads = 0;

  void validate() const;
  friend bool operator==(const FlowSettings&, const FlowSettings&) = default;
};

struct GradientSettings {
  double tol = 1e-6;         // cross-partial asymmetry
  std::size_t samples = 200;
  double fd_step = 1e-5;
  double positivity = 1e-9;  // min V and min |delta| must exceed this
  std::uint64_t seed = 17;
  friend bool operator==(const GradientSettings&, const GradientSettings&) = default;
};

struct SeparationSettings {
  std::size_t face_resolution = 181;  // directions per 2D face
  double margin = 1e-9;               // a_min of the separator LP
  friend bool operator==(const SeparationSettings&, const SeparationSettings&) = default;
};

struct RegionSettings {
  double tol = 1e-9;
  friend bool operator==(const RegionSettings&, const RegionSettings&) = default;
};

struct SimSettings {
  std::uint64_t seed = 20240601;
  double horizon = 1e5;          // simulated time
  std::uint64_t max_events = 0;  // 0: unlimited
  std::vector<std::int64_t> initial;  // empty: origin
  double compact_radius = 0.0;   // 0: dimension d
  std::size_t replicas = 5;
  double slope_lo = 0.02;
  double slope_hi = 0.1;
  std::uint64_t thin = 0;        // trajectory thinning; 0 disables the trace
  unsigned threads = 0;
  friend bool operator==(const SimSettings&, const SimSettings&) = default;
};

struct SweepSettings {
  Vec lo{0.0, 0.0};
  Vec hi{1.2, 1.2};
  std::size_t grid = 41;
  friend bool operator==(const SweepSettings&, const SweepSettings&) = default;
};

struct AnalysisSettings {
  FlowSettings flow;
  GradientSettings gradient;
  SeparationSettings separation;
  RegionSettings region;
  SimSettings sim;
  friend bool operator==(const AnalysisSettings&, const AnalysisSettings&) = default;
};

struct Scenario {
  std::string name;
  Model model;
  AnalysisSettings analysis;
  std::optional<SweepSettings> sweep;

  std::size_t dimension() const { return bdstab::dimension(model); }
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Named parameters of a builtin scenario; scalars are one-element vectors.
using BuiltinParams = std::map<std::string, Vec>;

/// coupled2, jsq2, coupled3, shannon2, polytope2. Unknown names and invalid
/// parameters throw ContractError.
Scenario builtin_scenario(const std::string& name, const BuiltinParams& params = {});

std::vector<std::string> builtin_names();

bool is_builtin(const std::string& name);

}  // namespace bdstab
