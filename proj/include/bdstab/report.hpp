#pragma once

// Orchestration of the analyses and the JSON verdict report.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdstab/cone_geometry.hpp"
#include "bdstab/ctmc_sim.hpp"
#include "bdstab/gradient_system.hpp"
#include "bdstab/ode_flow.hpp"
#include "bdstab/region2d.hpp"
#include "bdstab/scenario.hpp"

namespace bdstab {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Overall { Stable, Unstable, Boundary, Inconclusive, Conflict };

std::string to_string(Overall o);

struct MethodVerdict {
  std::string method;  // ode, gradient, a1, region2d, simulation
  std::string label;
  bool analytic = true;
  nlohmann::json certificate;
};

struct VerdictReport {
  std::string scenario;
  std::string fingerprint;
  std::string family;
  std::vector<MethodVerdict> methods;
  Overall overall = Overall::Inconclusive;
  nlohmann::json settings;
  nlohmann::json extras;  // region polygon, scaling check, ...

  nlohmann::json to_json() const;
};

/// Combines analytic labels; Conflict when one says stable and another unstable.
Overall combine(const std::vector<Label>& analytic);

nlohmann::json to_json(const FlowVerdict& v);
nlohmann::json to_json(const GradientVerdict& v);
nlohmann::json to_json(const SeparationReport& r);
nlohmann::json to_json(const RegionVerdict& v);
nlohmann::json to_json(const RecurrenceEstimate& e);
nlohmann::json to_json(const SimSummary& s);
nlohmann::json to_json(const PinnedOccupancy& p);
nlohmann::json polygon_to_json(const std::vector<Vec>& polygon);

/// Runs the analytic methods that apply to the scenario's model family
/// (smooth: ode + gradient; support pattern: a1, plus region2d in 2D; cone
/// partition: region2d), and the simulation when requested.
VerdictReport classify(const Scenario& scenario, bool with_simulation);

/// classify plus the region polygon, scaling check and simulation.
VerdictReport full_report(const Scenario& scenario);

}  // namespace bdstab
