#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdstab/errors.hpp"
#include "bdstab/report.hpp"
#include "bdstab/scenario_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bdstab;

namespace {

enum Exit { kOk = 0, kInput = 2, kConflict = 3, kRuntime = 4 };

struct Options {
  std::string scenario;
  std::string lambda;
  std::vector<std::string> params;
  std::size_t grid = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double horizon = 0.0;
  std::size_t mesh = 0;
  double tol = 0.0;
  std::string format = "json";
  std::string out;
  std::string x0;
  bool simulate = false;
  std::uint64_t thin = 0;
  std::size_t replicas = 0;
};

Vec parse_list(const std::string& text, const std::string& flag) {
  Vec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ContractError(flag + ": cannot parse '" + item + "' as a number");
    }
  }
  if (v.empty()) throw ContractError(flag + ": empty list");
  return v;
}

Scenario load(const Options& o) {
  BuiltinParams params;
  for (const auto& p : o.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw ContractError("--param expects key=v1,v2,...");
    params[p.substr(0, eq)] = parse_list(p.substr(eq + 1), "--param " + p.substr(0, eq));
  }
  const bool builtin = is_builtin(o.scenario);
  if (!o.lambda.empty() && builtin) params["lambda"] = parse_list(o.lambda, "--lambda");
  Scenario s = resolve_scenario(o.scenario, params);
  if (!o.lambda.empty() && !builtin) s.model = with_arrivals(s.model, parse_list(o.lambda, "--lambda"));

  auto& a = s.analysis;
  if (o.mesh) a.flow.mesh = o.mesh;
  if (o.tol > 0.0) a.region.tol = o.tol;
  if (o.seed_set) a.sim.seed = o.seed;
  if (o.horizon > 0.0) a.sim.horizon = o.horizon;
  if (o.replicas) a.sim.replicas = o.replicas;
  if (o.thin) a.sim.thin = o.thin;
  if (o.grid) {
    if (!s.sweep) s.sweep = SweepSettings{};
    s.sweep->grid = o.grid;
  }
  a.flow.validate();
  return s;
}

/// Writes to DIR/name when --out is given, otherwise to stdout.
void emit(const Options& o, const std::string& name, const std::string& content) {
  if (o.out.empty()) {
    std::cout << content;
    return;
  }
  fs::create_directories(o.out);
  std::ofstream f(fs::path(o.out) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(o.out) / name).string());
  f << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int run_report(const Options& o, const VerdictReport& rep) {
  emit(o, "report.json", dump(rep.to_json()));
  return rep.overall == Overall::Conflict ? kConflict : kOk;
}

int cmd_validate(const Options& o) {
  const Scenario s = load(o);
  json j{{"valid", true}, {"name", s.name}, {"family", family_name(s.model)}, {"dimension", s.dimension()},
         {"fingerprint", fingerprint(s)}};
  emit(o, "validate.json", dump(j));
  return kOk;
}

int cmd_region(const Options& o) {
  const Scenario s = load(o);
  const auto family = arrival_family(s.model);
  if (!family) throw Unsupported("region needs a 2D model whose drift is affine in the arrival rates");
  const auto polygon = region_polygon(*family);
  const SweepSettings sweep = s.sweep.value_or(SweepSettings{});
  const auto grid = sweep_region(*family, sweep, s.analysis.region.tol, s.analysis.flow.threads);

  std::ostringstream csv, svg;
  write_grid_csv(csv, grid);
  write_region_svg(svg, *family, polygon, &grid);
  json pj = polygon_to_json(polygon);
  pj["scenario"] = s.name;
  pj["fingerprint"] = fingerprint(s);
  pj["grid"] = {{"n", grid.n}, {"lo", grid.lo}, {"hi", grid.hi}};

  if (!o.out.empty()) {
    emit(o, "region.json", dump(pj));
    emit(o, "grid.csv", csv.str());
    emit(o, "region.svg", svg.str());
  } else if (o.format == "csv") {
    std::cout << csv.str();
  } else if (o.format == "svg") {
    std::cout << svg.str();
  } else {
    std::cout << dump(pj);
  }
  return kOk;
}

int cmd_simulate(const Options& o) {
  Scenario s = load(o);
  if (!o.x0.empty()) {
    s.analysis.sim.initial.clear();
    for (double v : parse_list(o.x0, "--x0")) {
      if (v < 0 || v != static_cast<double>(static_cast<std::int64_t>(v))) throw ContractError("--x0 needs nonnegative integers");
      s.analysis.sim.initial.push_back(static_cast<std::int64_t>(v));
    }
  }
  const auto est = estimate_recurrence(s.model, s.analysis.sim);
  json j = to_json(est);
  j["scenario"] = s.name;
  j["fingerprint"] = fingerprint(s);
  emit(o, "simulation.json", dump(j));
  if (s.analysis.sim.thin > 0) {
    std::ostringstream csv;
    write_trace_csv(csv, est.replicas.front().trace);
    if (!o.out.empty()) emit(o, "trace.csv", csv.str());
    else if (o.format == "csv") std::cout << csv.str();
  }
  return kOk;
}

int cmd_trace(const Options& o) {
  const Scenario s = load(o);
  Vec x0 = o.x0.empty() ? Vec(s.dimension(), 1.0 / std::sqrt(static_cast<double>(s.dimension()))) : parse_list(o.x0, "--x0");
  const auto tr = integrate(s.model, x0, s.analysis.flow, true);
  std::ostringstream csv;
  write_trajectory_csv(csv, tr);
  if (!o.out.empty()) {
    emit(o, "trajectory.csv", csv.str());
    emit(o, "trajectory.json", dump(json{{"termination", to_string(tr.termination)}, {"end_time", tr.end_time},
                                         {"end_state", tr.end_state}, {"steps", tr.steps}}));
  } else {
    std::cout << csv.str();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability of multi-dimensional birth-and-death processes with 0-homogeneous rates"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("scenario", o.scenario, "builtin name or scenario JSON file")->required();
    sub->add_option("--param", o.params, "builtin parameter, key=v1,v2,...");
    sub->add_option("--lambda", o.lambda, "arrival rates, comma separated");
    sub->add_option("--grid", o.grid, "grid points per axis of the arrival sweep");
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { o.seed = v; o.seed_set = true; }, "simulation seed");
    sub->add_option("--horizon", o.horizon, "simulated time per replica");
    sub->add_option("--replicas", o.replicas, "simulation replicas");
    sub->add_option("--mesh", o.mesh, "directions of the 2D ODE mesh");
    sub->add_option("--tol", o.tol, "membership tolerance of the 2D criterion");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv", "svg"}));
    sub->add_option("--out", o.out, "write artifacts into this directory");
  };

  auto* validate = app.add_subcommand("validate", "load and check a scenario");
  common(validate);
  auto* classify_cmd = app.add_subcommand("classify", "run the analytic criteria");
  common(classify_cmd);
  classify_cmd->add_flag("--simulate", o.simulate, "append the simulation estimate");
  auto* region = app.add_subcommand("region", "stability region in the arrival plane");
  common(region);
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate the lattice chain");
  common(simulate_cmd);
  simulate_cmd->add_option("--x0", o.x0, "initial state");
  simulate_cmd->add_option("--thin", o.thin, "record every n-th event");
  auto* trace = app.add_subcommand("trace-ode", "integrate the fluid ODE from one point");
  common(trace);
  trace->add_option("--x0", o.x0, "initial point");
  auto* report = app.add_subcommand("report", "everything in one JSON report");
  common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (validate->parsed()) return cmd_validate(o);
    if (classify_cmd->parsed()) return run_report(o, classify(load(o), o.simulate));
    if (region->parsed()) return cmd_region(o);
    if (simulate_cmd->parsed()) return cmd_simulate(o);
    if (trace->parsed()) return cmd_trace(o);
    if (report->parsed()) return run_report(o, full_report(load(o)));
  } catch (const SchemaError& e) {
    std::cerr << "schema error at " << e.what() << "\n";
    return kInput;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInput;
  } catch (const HomogeneityError& e) {
    std::cerr << "homogeneity error: " << e.what() << "\n";
    return kInput;
  } catch (const EvalError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return kInput;
  } catch (const Error& e) {
    // Contract, domain, dimension and unsupported-model errors all trace back to the input.
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}
