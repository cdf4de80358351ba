#pragma once

// Scenario documents: a single JSON object
//   {schema_version, name, dimension, model: {family, ...}, analysis: {...}, sweep: {...}?}
// Builtin models ({"family": "builtin", "name": ..., "params": {...}}) are
// expanded on load, so saving writes the explicit model.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "bdstab/scenario.hpp"

namespace bdstab {

inline constexpr int kSchemaVersion = 1;

/// Parses and validates a scenario document. Throws SchemaError with a JSON
/// pointer, HomogeneityError or EvalError.
Scenario scenario_from_json(const nlohmann::json& doc);

nlohmann::json scenario_to_json(const Scenario& scenario);

/// Reads a file of at most 1 MiB.
Scenario load_scenario(const std::filesystem::path& path);

void save_scenario(const std::filesystem::path& path, const Scenario& scenario);

/// A builtin name or a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path, const BuiltinParams& params = {});

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string fingerprint(const Scenario& scenario);

nlohmann::json settings_to_json(const AnalysisSettings& settings);

}  // namespace bdstab
