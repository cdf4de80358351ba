#include "bdstab/ctmc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>

#include "bdstab/errors.hpp"
#include "bdstab/parallel.hpp"

namespace bdstab {

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) {
  std::uint64_t z = master + (replica + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

/// Rates at lattice states; piecewise-constant models are tabulated once.
class RateSource {
 public:
  explicit RateSource(const Model& model) : model_(model), d_(dimension(model)), origin_(origin_births(model)) {
    if (const auto* s = std::get_if<SupportPatternDrift>(&model)) {
      for (Pattern p = 0; p < s->pattern_count(); ++p) {
        births_.push_back(s->births(p));
        deaths_.push_back(s->deaths(p));
      }
    }
    if (const auto* c = std::get_if<ConeModel>(&model)) partition_.emplace(c->partition());
  }

  void at(const LatticeState& x, Pattern p, Vec& birth, Vec& death) {
    if (p == 0) {
      birth = origin_;
      death.assign(d_, 0.0);
      return;
    }
    if (!births_.empty()) {
      birth = births_[p];
      death = deaths_[p];
      return;
    }
    xd_.resize(d_);
    for (std::size_t i = 0; i < d_; ++i) xd_[i] = static_cast<double>(x[i]);
    if (partition_) {
      const std::size_t k = partition_->cone_of(xd_);
      birth = partition_->births(k);
      death = partition_->deaths(k);
    } else {
      Rates r = std::get<SmoothDrift>(model_).rates(xd_);
      birth = std::move(r.birth);
      death = std::move(r.death);
    }
    for (std::size_t i = 0; i < d_; ++i)
      if (x[i] == 0) death[i] = 0.0;
  }

 private:
  const Model& model_;
  std::size_t d_;
  Vec origin_;
  std::vector<Vec> births_;
  std::vector<Vec> deaths_;
  std::optional<ConePartition2D> partition_;
  Vec xd_;
};

double uniform01(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double norm2(const LatticeState& x) {
  double s = 0.0;
  for (auto v : x) s += static_cast<double>(v) * static_cast<double>(v);
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SimSummary simulate(const Model& model, const SimConfig& config, std::uint64_t replica) {
  const std::size_t d = dimension(model);
  if (!(config.horizon > 0.0)) throw ContractError("simulation horizon must be positive");
  LatticeState x = config.initial.empty() ? LatticeState(d, 0) : config.initial;
  if (x.size() != d) throw DimensionError("initial state has dimension " + std::to_string(x.size()) + ", model has " + std::to_string(d));
  for (auto v : x)
    if (v < 0) throw DomainError("initial state must lie in the orthant");

  SimSummary out;
  out.seed = replica_seed(config.seed, replica);
  out.compact_radius = config.compact_radius > 0.0 ? config.compact_radius : static_cast<double>(d);
  const double r2 = out.compact_radius * out.compact_radius;
  std::mt19937_64 rng(out.seed);
  RateSource source(model);
  std::vector<double> occupancy(std::size_t{1} << d, 0.0);
  Vec birth, death;

  double t = 0.0;
  bool inside = norm2(x) <= r2;
  double exit_time = 0.0;
  double excursion_sum = 0.0;
  if (config.thin > 0) out.trace.push_back({0.0, x});

  while (t < config.horizon && (config.max_events == 0 || out.events < config.max_events)) {
    Pattern p = 0;
    for (std::size_t i = 0; i < d; ++i)
      if (x[i] > 0) p |= Pattern{1} << i;
    source.at(x, p, birth, death);
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) total += birth[i] + death[i];
    if (!(total > 0.0)) {
      out.absorbed = true;
      occupancy[p] += config.horizon - t;
      t = config.horizon;
      break;
    }
    const double dt = -std::log(uniform01(rng)) / total;
    if (t + dt >= config.horizon) {
      occupancy[p] += config.horizon - t;
      t = config.horizon;
      break;
    }
    occupancy[p] += dt;
    t += dt;

    double target = uniform01(rng) * total;
    std::size_t event = 2 * d - 1;
    for (std::size_t e = 0; e < 2 * d; ++e) {
      const double rate = e < d ? birth[e] : death[e - d];
      if (target < rate) {
        event = e;
        break;
      }
      target -= rate;
    }
    // Rounding can leave the scan past the last positive rate.
    while ((event < d ? birth[event] : death[event - d]) <= 0.0) --event;
    if (event < d) ++x[event];
    else --x[event - d];
    ++out.events;

    const bool now_inside = norm2(x) <= r2;
    if (now_inside && !inside) {
      ++out.returns;
      excursion_sum += t - exit_time;
    } else if (!now_inside && inside) {
      exit_time = t;
    }
    inside = now_inside;
    if (config.thin > 0 && out.events % config.thin == 0 && out.trace.size() < 1000000) out.trace.push_back({t, x});
  }

  out.time = t;
  out.end_state = x;
  out.slope.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.slope[i] = t > 0.0 ? static_cast<double>(x[i]) / t : 0.0;
  out.slope_norm = t > 0.0 ? std::sqrt(norm2(x)) / t : 0.0;
  out.mean_return_time = out.returns > 0 ? excursion_sum / static_cast<double>(out.returns) : 0.0;
  double total_time = 0.0;
  for (double o : occupancy) total_time += o;
  out.occupancy.resize(occupancy.size());
  for (std::size_t p = 0; p < occupancy.size(); ++p) out.occupancy[p] = total_time > 0.0 ? occupancy[p] / total_time : 0.0;
  return out;
}

RecurrenceEstimate estimate_recurrence(const Model& model, const SimConfig& config) {
  if (config.replicas == 0) throw ContractError("at least one replica is required");
  RecurrenceEstimate est;
  est.replicas.resize(config.replicas);
  parallel_for(config.replicas, [&](std::size_t i) { est.replicas[i] = simulate(model, config, i); }, config.threads);

  std::vector<double> slopes;
  bool all_high = true;
  bool all_return = true;
  est.min_returns = est.replicas.front().returns;
  for (const auto& r : est.replicas) {
    slopes.push_back(r.slope_norm);
    all_high = all_high && r.slope_norm >= config.slope_hi;
    all_return = all_return && r.returns > 0;
    est.min_returns = std::min(est.min_returns, r.returns);
  }
  est.median_slope = median(slopes);
  const std::size_t d = est.replicas.front().slope.size();
  est.median_coordinate_slope.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> s;
    for (const auto& r : est.replicas) s.push_back(r.slope[i]);
    est.median_coordinate_slope[i] = median(s);
  }
  if (all_high) est.label = Empirical::Unstable;
  else if (est.median_slope <= config.slope_lo && all_return) est.label = Empirical::Stable;
  return est;
}

PinnedOccupancy pinned_face_occupancy(const SupportPatternDrift& model, std::size_t k, const SimConfig& config) {
  if (model.dimension() != 3) throw DimensionError("pinned occupancy needs a 3D support-pattern model");
  if (k >= 3) throw ContractError("pinned coordinate out of range");
  PinnedOccupancy out;
  out.pinned = k;
  std::size_t n = 0;
  for (std::size_t i = 0; i < 3; ++i)
    if (i != k) out.free[n++] = i;

  const Pattern kbit = Pattern{1} << k;
  auto lift = [&](Pattern p2) {
    Pattern p3 = kbit;
    for (std::size_t j = 0; j < 2; ++j)
      if (in_pattern(p2, j)) p3 |= Pattern{1} << out.free[j];
    return p3;
  };
  auto restrict = [&](const Vec& v) { return Vec{v[out.free[0]], v[out.free[1]]}; };
  std::vector<SupportPatternDrift::Entry> entries;
  for (Pattern p2 = 1; p2 < 4; ++p2) entries.push_back({p2, restrict(model.births(lift(p2))), restrict(model.deaths(lift(p2)))});
  const Model pinned = SupportPatternDrift(2, std::move(entries), restrict(model.births(kbit)));

  SimConfig cfg = config;
  if (cfg.initial.size() == 3) cfg.initial = {config.initial[out.free[0]], config.initial[out.free[1]]};
  out.estimate = estimate_recurrence(pinned, cfg);
  out.pi.assign(4, 0.0);
  for (const auto& r : out.estimate.replicas)
    for (std::size_t p = 0; p < 4; ++p) out.pi[p] += r.occupancy[p] / static_cast<double>(out.estimate.replicas.size());
  out.drift_component.resize(4);
  for (Pattern p2 = 0; p2 < 4; ++p2) {
    out.drift_component[p2] = model.drift(lift(p2))[k];
    out.lhs += out.pi[p2] * out.drift_component[p2];
  }
  out.reliable = out.estimate.label != Empirical::Unstable;
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
  const std::size_t d = trace.empty() ? 0 : trace.front().x.size();
  out << "t";
  for (std::size_t i = 0; i < d; ++i) out << ",x" << i + 1;
  out << "\r\n";
  char buf[32];
  for (const auto& p : trace) {
    std::snprintf(buf, sizeof buf, "%.17g", p.t);
    out << buf;
    for (auto v : p.x) out << ',' << v;
    out << "\r\n";
  }
}

}  // namespace bdstab
