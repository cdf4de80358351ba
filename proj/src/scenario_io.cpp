#include "bdstab/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bdstab/errors.hpp"

namespace bdstab {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& ptr, const std::string& what) { throw SchemaError(ptr.empty() ? "/" : ptr, what); }

std::string child(const std::string& ptr, const std::string& key) {
  std::string esc;
  for (char c : key) {
    if (c == '~') esc += "~0";
    else if (c == '/') esc += "~1";
    else esc += c;
  }
  return ptr + "/" + esc;
}

std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

void require_object(const json& j, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& ptr) {
  require_object(obj, ptr);
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) fail(child(ptr, k), "unknown field");
  }
}

const json& field(const json& obj, const char* key, const std::string& ptr) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(child(ptr, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ptr, "expected a finite number");
  return v;
}

double rate(const json& j, const std::string& ptr) {
  const double v = number(j, ptr);
  if (v < 0.0) fail(ptr, "rates must be non-negative");
  return v;
}

Vec vec(const json& j, const std::string& ptr, std::size_t size, bool rates) {
  if (!j.is_array()) fail(ptr, "expected an array of numbers");
  if (size != 0 && j.size() != size) fail(ptr, "expected " + std::to_string(size) + " numbers, got " + std::to_string(j.size()));
  Vec out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rates ? rate(j[i], child(ptr, i)) : number(j[i], child(ptr, i)));
  return out;
}

std::vector<Vec> vecs(const json& j, const std::string& ptr, std::size_t size, bool rates) {
  if (!j.is_array() || j.empty()) fail(ptr, "expected a non-empty array of vectors");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec(j[i], child(ptr, i), size, rates));
  return out;
}

std::int64_t integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    if (!j.is_number_unsigned()) fail(ptr, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

template <class T>
void opt(const json& obj, const char* key, const std::string& ptr, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string p = child(ptr, key);
  if constexpr (std::is_same_v<T, double>) {
    out = number(*it, p);
  } else if constexpr (std::is_same_v<T, Vec>) {
    out = vec(*it, p, 0, false);
  } else if constexpr (std::is_same_v<T, std::vector<std::int64_t>>) {
    if (!it->is_array()) fail(p, "expected an array of integers");
    out.clear();
    for (std::size_t i = 0; i < it->size(); ++i) out.push_back(integer((*it)[i], child(p, i)));
  } else if constexpr (std::is_same_v<T, int>) {
    out = static_cast<int>(integer(*it, p));
  } else {
    out = static_cast<T>(unsigned_integer(*it, p));
  }
}

// ---------------------------------------------------------------------------
// model

RateFn rate_fn(const json& j, const std::string& ptr, std::size_t dim) {
  if (j.is_number()) return ConstantRate{rate(j, ptr)};
  only_keys(j, {"kind", "value", "text", "coordinate", "noise"}, ptr);
  const json& kind = field(j, "kind", ptr);
  if (!kind.is_string()) fail(child(ptr, "kind"), "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "constant") return ConstantRate{rate(field(j, "value", ptr), child(ptr, "value"))};
  if (k == "expr") {
    const json& text = field(j, "text", ptr);
    if (!text.is_string()) fail(child(ptr, "text"), "expected a string");
    try {
      return ExprRate(text.get<std::string>());
    } catch (const ParseError& e) {
      fail(child(ptr, "text"), e.what());
    }
  }
  if (k == "shannon") {
    const std::int64_t c = integer(field(j, "coordinate", ptr), child(ptr, "coordinate"));
    if (c < 1 || static_cast<std::size_t>(c) > dim) fail(child(ptr, "coordinate"), "coordinate out of range");
    ShannonRate s{static_cast<std::size_t>(c - 1), 0.1};
    if (j.contains("noise")) {
      s.noise = number(j["noise"], child(ptr, "noise"));
      if (!(s.noise > 0.0)) fail(child(ptr, "noise"), "noise must be positive");
    }
    return s;
  }
  fail(child(ptr, "kind"), "unknown rate kind '" + k + "'");
}

json rate_fn_to_json(const RateFn& fn) {
  return std::visit(overloaded{
                        [](const ConstantRate& c) { return json(c.value); },
                        [](const ShannonRate& s) { return json{{"kind", "shannon"}, {"coordinate", s.coordinate + 1}, {"noise", s.noise}}; },
                        [](const ExprRate& e) { return json{{"kind", "expr"}, {"text", e.text}}; },
                    },
                    fn);
}

Pattern support_from_json(const json& j, const std::string& ptr, std::size_t dim) {
  if (!j.is_array() || j.empty()) fail(ptr, "expected a non-empty array of 1-based coordinates");
  Pattern p = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::int64_t c = integer(j[i], child(ptr, i));
    if (c < 1 || static_cast<std::size_t>(c) > dim) fail(child(ptr, i), "coordinate out of range");
    p |= Pattern{1} << (c - 1);
  }
  return p;
}

template <class Fn>
auto construct(const std::string& ptr, Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const HomogeneityError&) {
    throw;
  } catch (const EvalError&) {
    throw;
  } catch (const Error& e) {
    fail(ptr, e.what());
  }
}

struct LoadedModel {
  Model model;
  std::optional<Scenario> builtin;
};

LoadedModel model_from_json(const json& j, std::size_t dim) {
  const std::string ptr = "/model";
  require_object(j, ptr);
  const json& fam = field(j, "family", ptr);
  if (!fam.is_string()) fail(child(ptr, "family"), "expected a string");
  const std::string family = fam.get<std::string>();

  if (family == "builtin") {
    only_keys(j, {"family", "name", "params"}, ptr);
    const json& name = field(j, "name", ptr);
    if (!name.is_string()) fail(child(ptr, "name"), "expected a string");
    BuiltinParams params;
    if (j.contains("params")) {
      const std::string pp = child(ptr, "params");
      require_object(j["params"], pp);
      for (const auto& [k, v] : j["params"].items()) params[k] = v.is_number() ? Vec{number(v, child(pp, k))} : vec(v, child(pp, k), 0, false);
    }
    if (!is_builtin(name.get<std::string>())) fail(child(ptr, "name"), "unknown builtin scenario '" + name.get<std::string>() + "'");
    Scenario s = construct(child(ptr, "params"), [&] { return builtin_scenario(name.get<std::string>(), params); });
    Model m = s.model;
    return {std::move(m), std::move(s)};
  }
  if (family == "support_pattern") {
    only_keys(j, {"family", "patterns", "origin_births"}, ptr);
    const std::string pp = child(ptr, "patterns");
    const json& pats = field(j, "patterns", ptr);
    if (!pats.is_array()) fail(pp, "expected an array");
    std::vector<SupportPatternDrift::Entry> entries;
    for (std::size_t i = 0; i < pats.size(); ++i) {
      const std::string ep = child(pp, i);
      only_keys(pats[i], {"support", "births", "deaths"}, ep);
      entries.push_back({support_from_json(field(pats[i], "support", ep), child(ep, "support"), dim),
                         vec(field(pats[i], "births", ep), child(ep, "births"), dim, true),
                         vec(field(pats[i], "deaths", ep), child(ep, "deaths"), dim, true)});
    }
    Vec origin;
    if (j.contains("origin_births")) origin = vec(j["origin_births"], child(ptr, "origin_births"), dim, true);
    return {construct(ptr, [&] { return Model(SupportPatternDrift(dim, std::move(entries), std::move(origin))); }), std::nullopt};
  }
  if (family == "cone_partition") {
    only_keys(j, {"family", "rays", "deaths", "extra_births", "lambda"}, ptr);
    if (dim != 2) fail("/dimension", "cone partitions are 2D");
    auto rays = vecs(field(j, "rays", ptr), child(ptr, "rays"), 2, true);
    auto deaths = vecs(field(j, "deaths", ptr), child(ptr, "deaths"), 2, true);
    std::vector<Vec> extras(deaths.size(), Vec{0.0, 0.0});
    if (j.contains("extra_births")) extras = vecs(j["extra_births"], child(ptr, "extra_births"), 2, false);
    Vec lambda = vec(field(j, "lambda", ptr), child(ptr, "lambda"), 2, true);
    return {construct(ptr, [&] {
              ArrivalFamily2D f(std::move(rays), std::move(deaths), std::move(extras));
              ConeModel m{std::move(f), std::move(lambda)};
              m.partition();
              return Model(std::move(m));
            }),
            std::nullopt};
  }
  if (family == "smooth") {
    only_keys(j, {"family", "births", "deaths"}, ptr);
    CoordinateRates rates;
    for (const char* key : {"births", "deaths"}) {
      const std::string fp = child(ptr, key);
      const json& arr = field(j, key, ptr);
      if (!arr.is_array() || arr.size() != dim) fail(fp, "expected " + std::to_string(dim) + " rates");
      auto& dst = std::string(key) == "births" ? rates.births : rates.deaths;
      for (std::size_t i = 0; i < dim; ++i) dst.push_back(rate_fn(arr[i], child(fp, i), dim));
    }
    return {construct(ptr, [&] { return Model(SmoothDrift(dim, std::move(rates))); }), std::nullopt};
  }
  if (family == "polytope") {
    only_keys(j, {"family", "arrival_vertices", "capacity_vertices"}, ptr);
    PolytopeAllocation law{vecs(field(j, "arrival_vertices", ptr), child(ptr, "arrival_vertices"), dim, true),
                           vecs(field(j, "capacity_vertices", ptr), child(ptr, "capacity_vertices"), dim, true)};
    return {construct(ptr, [&] { return Model(SmoothDrift(dim, std::move(law))); }), std::nullopt};
  }
  fail(child(ptr, "family"), "unknown model family '" + family + "'");
}

json model_to_json(const Model& model) {
  return std::visit(overloaded{
                        [](const SupportPatternDrift& m) {
                          json pats = json::array();
                          for (const auto& e : m.entries()) {
                            json support = json::array();
                            for (std::size_t i = 0; i < m.dimension(); ++i)
                              if (in_pattern(e.support, i)) support.push_back(i + 1);
                            pats.push_back({{"support", support}, {"births", e.births}, {"deaths", e.deaths}});
                          }
                          return json{{"family", "support_pattern"}, {"patterns", pats}, {"origin_births", m.births(0)}};
                        },
                        [](const ConeModel& m) {
                          return json{{"family", "cone_partition"},
                                      {"rays", m.family.rays()},
                                      {"deaths", m.family.deaths()},
                                      {"extra_births", m.family.extra_births()},
                                      {"lambda", m.lambda}};
                        },
                        [](const SmoothDrift& m) {
                          return std::visit(overloaded{
                                                [](const CoordinateRates& c) {
                                                  json b = json::array(), d = json::array();
                                                  for (const auto& fn : c.births) b.push_back(rate_fn_to_json(fn));
                                                  for (const auto& fn : c.deaths) d.push_back(rate_fn_to_json(fn));
                                                  return json{{"family", "smooth"}, {"births", b}, {"deaths", d}};
                                                },
                                                [](const PolytopeAllocation& p) {
                                                  return json{{"family", "polytope"},
                                                              {"arrival_vertices", p.arrival_vertices},
                                                              {"capacity_vertices", p.capacity_vertices}};
                                                },
                                            },
                                            m.law());
                        },
                    },
                    model);
}

// ---------------------------------------------------------------------------
// settings

void analysis_from_json(const json& j, AnalysisSettings& a) {
  const std::string ptr = "/analysis";
  only_keys(j, {"flow", "gradient", "separation", "region", "sim"}, ptr);
  if (j.contains("flow")) {
    const std::string p = child(ptr, "flow");
    const json& f = j["flow"];
    only_keys(f, {"h0", "rtol", "atol", "kappa", "r_max", "t_max", "mesh", "icosphere_level", "unstable_margin", "min_step_fraction", "threads"}, p);
    opt(f, "h0", p, a.flow.h0);
    opt(f, "rtol", p, a.flow.rtol);
    opt(f, "atol", p, a.flow.atol);
    opt(f, "kappa", p, a.flow.kappa);
    opt(f, "r_max", p, a.flow.r_max);
    opt(f, "t_max", p, a.flow.t_max);
    opt(f, "mesh", p, a.flow.mesh);
    opt(f, "icosphere_level", p, a.flow.icosphere_level);
    opt(f, "unstable_margin", p, a.flow.unstable_margin);
    opt(f, "min_step_fraction", p, a.flow.min_step_fraction);
    opt(f, "threads", p, a.flow.threads);
    try {
      a.flow.validate();
    } catch (const ContractError& e) {
      fail(p, e.what());
    }
  }
  if (j.contains("gradient")) {
    const std::string p = child(ptr, "gradient");
    const json& g = j["gradient"];
    only_keys(g, {"tol", "samples", "fd_step", "positivity", "seed"}, p);
    opt(g, "tol", p, a.gradient.tol);
    opt(g, "samples", p, a.gradient.samples);
    opt(g, "fd_step", p, a.gradient.fd_step);
    opt(g, "positivity", p, a.gradient.positivity);
    opt(g, "seed", p, a.gradient.seed);
  }
  if (j.contains("separation")) {
    const std::string p = child(ptr, "separation");
    const json& s = j["separation"];
    only_keys(s, {"face_resolution", "margin"}, p);
    opt(s, "face_resolution", p, a.separation.face_resolution);
    opt(s, "margin", p, a.separation.margin);
  }
  if (j.contains("region")) {
    const std::string p = child(ptr, "region");
    only_keys(j["region"], {"tol"}, p);
    opt(j["region"], "tol", p, a.region.tol);
  }
  if (j.contains("sim")) {
    const std::string p = child(ptr, "sim");
    const json& s = j["sim"];
    only_keys(s, {"seed", "horizon", "max_events", "initial", "compact_radius", "replicas", "slope_lo", "slope_hi", "thin", "threads"}, p);
    opt(s, "seed", p, a.sim.seed);
    opt(s, "horizon", p, a.sim.horizon);
    opt(s, "max_events", p, a.sim.max_events);
    opt(s, "initial", p, a.sim.initial);
    opt(s, "compact_radius", p, a.sim.compact_radius);
    opt(s, "replicas", p, a.sim.replicas);
    opt(s, "slope_lo", p, a.sim.slope_lo);
    opt(s, "slope_hi", p, a.sim.slope_hi);
    opt(s, "thin", p, a.sim.thin);
    opt(s, "threads", p, a.sim.threads);
    if (!(a.sim.horizon > 0.0)) fail(child(p, "horizon"), "horizon must be positive");
    if (a.sim.replicas == 0) fail(child(p, "replicas"), "at least one replica is required");
  }
}

SweepSettings sweep_from_json(const json& j, SweepSettings s) {
  const std::string ptr = "/sweep";
  only_keys(j, {"lo", "hi", "grid"}, ptr);
  if (j.contains("lo")) s.lo = vec(j["lo"], child(ptr, "lo"), 2, true);
  if (j.contains("hi")) s.hi = vec(j["hi"], child(ptr, "hi"), 2, true);
  opt(j, "grid", ptr, s.grid);
  if (s.grid < 2) fail(child(ptr, "grid"), "grid needs at least 2 points");
  return s;
}

}  // namespace

json settings_to_json(const AnalysisSettings& a) {
  return json{
      {"flow",
       {{"h0", a.flow.h0},
        {"rtol", a.flow.rtol},
        {"atol", a.flow.atol},
        {"kappa", a.flow.kappa},
        {"r_max", a.flow.r_max},
        {"t_max", a.flow.t_max},
        {"mesh", a.flow.mesh},
        {"icosphere_level", a.flow.icosphere_level},
        {"unstable_margin", a.flow.unstable_margin},
        {"min_step_fraction", a.flow.min_step_fraction},
        {"threads", a.flow.threads}}},
      {"gradient",
       {{"tol", a.gradient.tol},
        {"samples", a.gradient.samples},
        {"fd_step", a.gradient.fd_step},
        {"positivity", a.gradient.positivity},
        {"seed", a.gradient.seed}}},
      {"separation", {{"face_resolution", a.separation.face_resolution}, {"margin", a.separation.margin}}},
      {"region", {{"tol", a.region.tol}}},
      {"sim",
       {{"seed", a.sim.seed},
        {"horizon", a.sim.horizon},
        {"max_events", a.sim.max_events},
        {"initial", a.sim.initial},
        {"compact_radius", a.sim.compact_radius},
        {"replicas", a.sim.replicas},
        {"slope_lo", a.sim.slope_lo},
        {"slope_hi", a.sim.slope_hi},
        {"thin", a.sim.thin},
        {"threads", a.sim.threads}}},
  };
}

Scenario scenario_from_json(const json& doc) {
  only_keys(doc, {"schema_version", "name", "dimension", "model", "analysis", "sweep"}, "");
  const json& version = field(doc, "schema_version", "");
  if (!version.is_number_integer() || version.get<std::int64_t>() != kSchemaVersion) {
    fail("/schema_version", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  const std::int64_t dim = integer(field(doc, "dimension", ""), "/dimension");
  if (dim < 2 || dim > 16) fail("/dimension", "dimension must be between 2 and 16");
  auto loaded = model_from_json(field(doc, "model", ""), static_cast<std::size_t>(dim));
  if (bdstab::dimension(loaded.model) != static_cast<std::size_t>(dim)) {
    fail("/dimension", "model has dimension " + std::to_string(bdstab::dimension(loaded.model)));
  }
  Scenario s = loaded.builtin ? std::move(*loaded.builtin) : Scenario{"", std::move(loaded.model), {}, std::nullopt};
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail("/name", "expected a string");
    s.name = doc["name"].get<std::string>();
  }
  if (s.name.empty()) fail("/name", "missing required field");
  if (doc.contains("analysis")) analysis_from_json(doc["analysis"], s.analysis);
  if (doc.contains("sweep")) s.sweep = sweep_from_json(doc["sweep"], s.sweep.value_or(SweepSettings{}));
  validate_model(s.model);
  return s;
}

json scenario_to_json(const Scenario& s) {
  json doc{{"schema_version", kSchemaVersion},
           {"name", s.name},
           {"dimension", s.dimension()},
           {"model", model_to_json(s.model)},
           {"analysis", settings_to_json(s.analysis)}};
  if (s.sweep) doc["sweep"] = json{{"lo", s.sweep->lo}, {"hi", s.sweep->hi}, {"grid", s.sweep->grid}};
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw SchemaError("/", "cannot read " + path.string() + ": " + ec.message());
  if (size > (1u << 20)) throw SchemaError("/", path.string() + " exceeds 1 MiB");
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

void save_scenario(const std::filesystem::path& path, const Scenario& scenario) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
}

Scenario resolve_scenario(const std::string& name_or_path, const BuiltinParams& params) {
  if (is_builtin(name_or_path)) return builtin_scenario(name_or_path, params);
  if (!params.empty()) throw ContractError("builtin parameters only apply to builtin scenarios");
  return load_scenario(name_or_path);
}

std::string fingerprint(const Scenario& scenario) {
  const std::string text = scenario_to_json(scenario).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bdstab
