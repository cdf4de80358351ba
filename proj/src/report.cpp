#include "bdstab/report.hpp"

#include <algorithm>

#include "bdstab/errors.hpp"
#include "bdstab/scenario_io.hpp"

namespace bdstab {

using nlohmann::json;

std::string to_string(Overall o) {
  switch (o) {
    case Overall::Stable: return "stable";
    case Overall::Unstable: return "unstable";
    case Overall::Boundary: return "boundary";
    case Overall::Inconclusive: return "inconclusive";
    case Overall::Conflict: return "conflict";
  }
  return "?";
}

Overall combine(const std::vector<Label>& analytic) {
  auto has = [&](Label l) { return std::find(analytic.begin(), analytic.end(), l) != analytic.end(); };
  if (has(Label::Stable) && has(Label::Unstable)) return Overall::Conflict;
  if (has(Label::Unstable)) return Overall::Unstable;
  if (has(Label::Stable)) return Overall::Stable;
  if (has(Label::Boundary)) return Overall::Boundary;
  return Overall::Inconclusive;
}

namespace {

json face_json(Pattern p, std::size_t d) {
  json f = json::array();
  for (std::size_t i = 0; i < d; ++i)
    if (in_pattern(p, i)) f.push_back(i + 1);
  return f;
}

json opt_vec(const Vec& v) { return v.empty() ? json(nullptr) : json(v); }

}  // namespace

json to_json(const FlowVerdict& v) {
  json j{{"label", to_string(v.label)},
         {"directions", v.directions},
         {"tally", {{"hit_inner_ball", v.hit}, {"exceeded_radius", v.exceeded}, {"exited_orthant", v.exited}, {"timeout", v.timeout}}},
         {"worst_direction", opt_vec(v.worst_direction)},
         {"forced_steps", v.forced_steps}};
  if (v.label == Label::Stable) j["sup_hitting_time"] = v.sup_hitting_time;
  if (v.expansion_time > 0.0) j["expansion"] = {{"time", v.expansion_time}, {"factor", v.expansion_factor}};
  return j;
}

json to_json(const GradientVerdict& v) {
  return json{{"label", to_string(v.label)},
              {"conservative", v.conservative.conservative},
              {"determined", v.conservative.determined},
              {"asymmetry", v.conservative.asymmetry},
              {"skipped_samples", v.conservative.skipped},
              {"min_potential", v.min_potential},
              {"min_speed", v.min_speed},
              {"argmin_potential", opt_vec(v.argmin_potential)},
              {"mesh_size", v.mesh_size}};
}

json to_json(const SeparationReport& r) {
  json faces = json::array();
  std::size_t d = 0;
  for (const auto& f : r.faces) d = std::max<std::size_t>(d, 32 - static_cast<std::size_t>(__builtin_clz(f.face)));
  for (const auto& f : r.faces) {
    json jf{{"face", face_json(f.face, d)}, {"holds", f.holds}, {"directions", f.directions}, {"min_margin", f.min_margin}, {"eta", opt_vec(f.worst_eta)}};
    if (f.failing_direction) jf["failing_direction"] = *f.failing_direction;
    faces.push_back(std::move(jf));
  }
  return json{{"holds", r.holds}, {"sampled_directions", true}, {"faces", faces}};
}

json to_json(const RegionVerdict& v) {
  auto witness = [](const USetWitness& w) {
    if (w.kind == USetWitness::Kind::U1) return json{{"kind", "U1"}, {"cone", w.index}, {"A", w.first}, {"B", w.second}, {"strict", w.strict}};
    return json{{"kind", "U2"}, {"ray", w.index}, {"alpha", w.first}, {"A", w.second}, {"strict", w.strict}};
  };
  json j{{"label", to_string(v.label)}, {"interpretation", "complement"}};
  j["witness"] = v.witness ? witness(*v.witness) : json(nullptr);
  json all = json::array();
  for (const auto& w : v.memberships) all.push_back(witness(w));
  j["memberships"] = all;
  return j;
}

json to_json(const SimSummary& s) {
  return json{{"seed", s.seed},
              {"end_state", s.end_state},
              {"time", s.time},
              {"events", s.events},
              {"slope", s.slope},
              {"slope_norm", s.slope_norm},
              {"returns", s.returns},
              {"mean_return_time", s.mean_return_time},
              {"compact_radius", s.compact_radius},
              {"occupancy", s.occupancy},
              {"absorbed", s.absorbed}};
}

json to_json(const RecurrenceEstimate& e) {
  json reps = json::array();
  for (const auto& r : e.replicas) reps.push_back(to_json(r));
  return json{{"label", to_string(e.label)},
              {"generator", kGeneratorId},
              {"median_slope", e.median_slope},
              {"median_coordinate_slope", e.median_coordinate_slope},
              {"min_returns", e.min_returns},
              {"replicas", reps}};
}

json to_json(const PinnedOccupancy& p) {
  return json{{"pinned", p.pinned + 1},
              {"free", {p.free[0] + 1, p.free[1] + 1}},
              {"pi00", p.pi[0]},
              {"pi10", p.pi[1]},
              {"pi01", p.pi[2]},
              {"pi11", p.pi[3]},
              {"drift_component", p.drift_component},
              {"lhs", p.lhs},
              {"reliable", p.reliable},
              {"pinned_process", to_json(p.estimate)}};
}

json polygon_to_json(const std::vector<Vec>& polygon) { return json{{"vertices", polygon}}; }

json VerdictReport::to_json() const {
  json methods_json = json::object();
  for (const auto& m : methods) {
    json c = m.certificate;
    c["label"] = m.label;
    c["analytic"] = m.analytic;
    methods_json[m.method] = std::move(c);
  }
  json j{{"tool_version", kToolVersion},
         {"scenario", scenario},
         {"fingerprint", fingerprint},
         {"family", family},
         {"methods", methods_json},
         {"overall", bdstab::to_string(overall)},
         {"settings", settings}};
  if (!extras.empty()) j["extras"] = extras;
  return j;
}

VerdictReport classify(const Scenario& scenario, bool with_simulation) {
  VerdictReport rep;
  rep.scenario = scenario.name;
  rep.fingerprint = fingerprint(scenario);
  rep.family = family_name(scenario.model);
  rep.settings = settings_to_json(scenario.analysis);
  const auto& a = scenario.analysis;
  std::vector<Label> labels;
  auto add = [&](std::string method, Label label, json cert) {
    labels.push_back(label);
    rep.methods.push_back({std::move(method), to_string(label), true, std::move(cert)});
  };

  if (std::holds_alternative<SmoothDrift>(scenario.model)) {
    const auto flow = classify_smooth(scenario.model, a.flow);
    json fc = to_json(flow);
    fc["mesh"] = a.flow.mesh;
    add("ode", flow.label, fc);
    const auto mesh = direction_mesh(scenario.dimension(), a.flow.mesh, a.flow.icosphere_level);
    const auto grad = check_gradient_criterion(scenario.model, mesh, a.gradient);
    add("gradient", grad.label, to_json(grad));
  } else if (const auto* sp = std::get_if<SupportPatternDrift>(&scenario.model)) {
    const auto sep = a1_all_faces(*sp, a.separation);
    add("a1", sep.holds ? Label::Stable : Label::Inconclusive, to_json(sep));
    if (sp->dimension() == 2) {
      const auto rv = classify_2d(cones_from_support(*sp), a.region.tol);
      add("region2d", rv.label, to_json(rv));
    }
  } else {
    const auto& cm = std::get<ConeModel>(scenario.model);
    const auto rv = classify_2d(cm.partition(), a.region.tol);
    add("region2d", rv.label, to_json(rv));
  }
  rep.overall = combine(labels);

  if (with_simulation) {
    const auto est = estimate_recurrence(scenario.model, a.sim);
    rep.methods.push_back({"simulation", to_string(est.label), false, to_json(est)});
  }
  return rep;
}

VerdictReport full_report(const Scenario& scenario) {
  VerdictReport rep = classify(scenario, true);
  if (auto family = arrival_family(scenario.model)) rep.extras["region_polygon"] = polygon_to_json(region_polygon(*family));
  if (std::holds_alternative<SmoothDrift>(scenario.model)) {
    const auto sc = scaling_check(scenario.model, scenario.analysis.flow);
    rep.extras["scaling_check"] = {{"passed", sc.passed}, {"max_deviation", sc.max_deviation}, {"factors", sc.factors}, {"per_factor", sc.per_factor}};
  }
  return rep;
}

}  // namespace bdstab
