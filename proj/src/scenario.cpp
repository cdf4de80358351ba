#include "bdstab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bdstab/errors.hpp"

namespace bdstab {

void FlowSettings::validate() const {
  if (!(kappa > 0.0 && kappa < 1.0 && r_max > 1.0)) throw ContractError("flow settings need 0 < kappa < 1 < r_max");
  if (!(t_max > 0.0)) throw ContractError("flow settings need t_max > 0");
  if (mesh < 8) throw ContractError("flow mesh needs at least 8 directions");
  if (!(h0 > 0.0 && rtol > 0.0 && atol > 0.0)) throw ContractError("flow step control must be positive");
  if (!(min_step_fraction > 0.0 && min_step_fraction < 0.25)) throw ContractError("flow min_step_fraction must lie in (0, 0.25)");
}

namespace {

class Params {
 public:
  Params(std::string scenario, const BuiltinParams& given, std::map<std::string, Vec> defaults)
      : scenario_(std::move(scenario)), values_(std::move(defaults)) {
    for (const auto& [key, value] : given) {
      auto it = values_.find(key);
      if (it == values_.end()) throw ContractError(scenario_ + ": unknown parameter '" + key + "'");
      if (value.size() != it->second.size()) {
        throw ContractError(scenario_ + ": parameter '" + key + "' needs " + std::to_string(it->second.size()) + " values");
      }
      it->second = value;
    }
    for (const auto& [key, value] : values_)
      for (double v : value)
        if (!std::isfinite(v)) throw ContractError(scenario_ + ": parameter '" + key + "' must be finite");
  }

  const Vec& get(const std::string& key) const { return values_.at(key); }

  const Vec& non_negative(const std::string& key) const {
    for (double v : get(key))
      if (v < 0.0) throw ContractError(scenario_ + ": parameter '" + key + "' must be non-negative");
    return get(key);
  }

  const Vec& positive(const std::string& key) const {
    for (double v : get(key))
      if (!(v > 0.0)) throw ContractError(scenario_ + ": parameter '" + key + "' must be positive");
    return get(key);
  }

 private:
  std::string scenario_;
  std::map<std::string, Vec> values_;
};

std::vector<Vec> unflatten(const Vec& flat, std::size_t d, const std::string& what) {
  if (flat.empty() || flat.size() % d != 0) throw ContractError(what + " must be a non-empty list of " + std::to_string(d) + "D vertices");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < flat.size(); i += d) out.emplace_back(flat.begin() + static_cast<long>(i), flat.begin() + static_cast<long>(i + d));
  return out;
}

Scenario coupled2(const BuiltinParams& given) {
  Params p("coupled2", given, {{"lambda", {0.3, 0.3}}, {"a", {0.6, 0.6}}});
  const Vec& lambda = p.non_negative("lambda");
  const Vec& a = p.positive("a");
  std::vector<SupportPatternDrift::Entry> entries = {
      {0b01, lambda, {1.0, a[1]}},
      {0b10, lambda, {a[0], 1.0}},
      {0b11, lambda, {a[0], a[1]}},
  };
  Scenario s{"coupled2", SupportPatternDrift(2, std::move(entries)), {}, SweepSettings{}};
  return s;
}

Scenario jsq2(const BuiltinParams& given) {
  Params p("jsq2", given, {{"lambda", {0.1, 0.1}}, {"nu", {0.2}}, {"a", {0.5, 0.5}}});
  const Vec& lambda = p.non_negative("lambda");
  const double nu = p.non_negative("nu")[0];
  const Vec& a = p.positive("a");
  const Vec e1{1.0, 0.0};
  const Vec e2{0.0, 1.0};
  ArrivalFamily2D family({e1, e1, {1.0, 1.0}, e2, e2}, {{1.0, 0.0}, a, a, {0.0, 1.0}}, {{0.0, nu}, {0.0, nu}, {nu, 0.0}, {nu, 0.0}});
  return Scenario{"jsq2", ConeModel{std::move(family), lambda}, {}, SweepSettings{}};
}

Scenario coupled3(const BuiltinParams& given) {
  Params p("coupled3", given,
           {{"lambda", {0.3, 0.3, 0.3}}, {"a", {2.0, 2.0, 2.0}}, {"a_pair", {1.5, 1.5, 1.5, 1.5, 1.5, 1.5}}});
  const Vec& lambda = p.non_negative("lambda");
  const Vec& a = p.positive("a");
  const Vec& ap = p.positive("a_pair");
  // a_pair order: a12, a13, a21, a23, a31, a32
  auto pair = [&](std::size_t i, std::size_t j) { return ap[2 * i + (j < i ? j : j - 1)]; };
  std::vector<SupportPatternDrift::Entry> entries;
  for (Pattern s = 1; s < 8; ++s) {
    Vec deaths(3);
    for (std::size_t i = 0; i < 3; ++i) {
      // rate coordinate i gets when positive alongside the other members of s
      std::vector<std::size_t> others;
      for (std::size_t j = 0; j < 3; ++j)
        if (j != i && in_pattern(s, j)) others.push_back(j);
      if (others.empty()) deaths[i] = a[i];
      else if (others.size() == 1) deaths[i] = pair(i, others[0]);
      else deaths[i] = 1.0;
    }
    entries.push_back({s, lambda, deaths});
  }
  Scenario s{"coupled3", SupportPatternDrift(3, std::move(entries)), {}, std::nullopt};
  s.analysis.separation.face_resolution = 91;
  return s;
}

Scenario shannon2(const BuiltinParams& given) {
  Params p("shannon2", given, {{"lambda", {0.4, 0.8}}, {"noise", {0.1}}});
  const Vec& lambda = p.non_negative("lambda");
  const double noise = p.positive("noise")[0];
  CoordinateRates rates;
  rates.births = {ConstantRate{lambda[0]}, ConstantRate{lambda[1]}};
  rates.deaths = {ShannonRate{0, noise}, ShannonRate{1, noise}};
  Scenario s{"shannon2", SmoothDrift(2, std::move(rates)), {}, std::nullopt};
  // Transient trajectories at the default noise escape slowly (|X_t|/t of
  // order 1e-2), below the generic simulation thresholds.
  s.analysis.sim.horizon = 1e6;
  s.analysis.sim.slope_lo = 0.005;
  s.analysis.sim.slope_hi = 0.01;
  return s;
}

Scenario polytope2(const BuiltinParams& given) {
  Params p("polytope2", given,
           {{"arrival_vertices", {0.2, 0.3, 0.3, 0.2}}, {"capacity_vertices", {0.0, 0.0, 1.0, 0.0, 0.7, 0.7, 0.0, 1.0}}});
  PolytopeAllocation law{unflatten(p.non_negative("arrival_vertices"), 2, "arrival_vertices"),
                         unflatten(p.non_negative("capacity_vertices"), 2, "capacity_vertices")};
  Scenario s{"polytope2", SmoothDrift(2, std::move(law)), {}, std::nullopt};
  // The field jumps across vertex switches; a coarser floor keeps sliding segments cheap.
  s.analysis.flow.min_step_fraction = 1e-2;
  return s;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"coupled2", "jsq2", "coupled3", "shannon2", "polytope2"}; }

bool is_builtin(const std::string& name) {
  const auto names = builtin_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario builtin_scenario(const std::string& name, const BuiltinParams& params) {
  if (name == "coupled2") return coupled2(params);
  if (name == "jsq2") return jsq2(params);
  if (name == "coupled3") return coupled3(params);
  if (name == "shannon2") return shannon2(params);
  if (name == "polytope2") return polytope2(params);
  throw ContractError("unknown builtin scenario '" + name + "'");
}

}  // namespace bdstab
