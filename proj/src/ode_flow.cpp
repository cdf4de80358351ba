#include "bdstab/ode_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "bdstab/errors.hpp"
#include "bdstab/parallel.hpp"

namespace bdstab {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::HitInnerBall: return "hit_inner_ball";
    case Termination::ExceededRadius: return "exceeded_radius";
    case Termination::ExitedOrthant: return "exited_orthant";
    case Termination::Timeout: return "timeout";
  }
  return "?";
}

namespace {

// Stage points outside the orthant see the field just inside it, so the
// flow continues smoothly through a face and the exit event can bisect the
// crossing. Coordinates that are exactly zero keep the masked rates.
Vec field(const Model& model, const Vec& u) {
  Vec p = u;
  const double inside = 1e-12 * norm(u);
  bool nonzero = false;
  for (auto& c : p) {
    if (c < 0.0) c = inside;
    nonzero = nonzero || c > 0.0;
  }
  if (!nonzero) return Vec(u.size(), 0.0);
  return drift_at(model, p);
}

Vec rk4(const Model& model, const Vec& u, double h) {
  const Vec k1 = field(model, u);
  Vec tmp = u;
  axpy(h / 2, k1, tmp);
  const Vec k2 = field(model, tmp);
  tmp = u;
  axpy(h / 2, k2, tmp);
  const Vec k3 = field(model, tmp);
  tmp = u;
  axpy(h, k3, tmp);
  const Vec k4 = field(model, tmp);
  Vec out = u;
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

/// Two half steps; the accepted solution of a doubling step.
Vec rk4_fine(const Model& model, const Vec& u, double h) { return rk4(model, rk4(model, u, h / 2), h / 2); }

double min_coord(const Vec& u, std::size_t* arg = nullptr) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (u[i] < u[k]) k = i;
  if (arg) *arg = k;
  return u[k];
}

struct Event {
  Termination kind;
  double s;  // step fraction at which it fires
};

bool fires(Termination kind, const Vec& y, const FlowSettings& st) {
  switch (kind) {
    case Termination::HitInnerBall: return norm(y) <= st.kappa;
    case Termination::ExceededRadius: return norm(y) >= st.r_max;
    case Termination::ExitedOrthant: return min_coord(y) < 0.0;
    default: return false;
  }
}

void require_smooth(const Model& model) {
  if (!std::holds_alternative<SmoothDrift>(model)) {
    throw ContractError("the fluid-flow analysis needs a smooth model; piecewise-constant drifts go through the cone analysis");
  }
}

}  // namespace

Trajectory integrate(const Model& model, const Vec& x0, const FlowSettings& st, bool record) {
  require_smooth(model);
  st.validate();
  drift_at(model, x0);  // validates the start point

  Trajectory tr;
  double t = 0.0;
  Vec u = x0;
  if (record) tr.samples.push_back({t, u});
  auto finish = [&](Termination kind, double time, Vec state) {
    tr.termination = kind;
    tr.end_time = time;
    if (kind == Termination::ExitedOrthant) min_coord(state, &tr.exit_coordinate);
    tr.end_state = std::move(state);
    if (record && tr.samples.back().t < time) tr.samples.push_back({time, tr.end_state});
    return tr;
  };
  if (norm(u) <= st.kappa) return finish(Termination::HitInnerBall, 0.0, u);
  if (norm(u) >= st.r_max) return finish(Termination::ExceededRadius, 0.0, u);

  double h = st.h0;
  for (;;) {
    if (t >= st.t_max) return finish(Termination::Timeout, t, u);
    const Vec f0 = field(model, u);
    const double speed = norm(f0);
    if (speed > 0.0) h = std::min(h, 0.25 * norm(u) / speed);
    const bool last = h >= st.t_max - t;
    if (last) h = st.t_max - t;

    const Vec coarse = rk4(model, u, h);
    const Vec fine = rk4_fine(model, u, h);
    const double err = norm(fine - coarse) / 15.0;
    const double scale = st.atol + st.rtol * std::max(norm(u), norm(fine));
    const double floor = speed > 0.0 ? st.min_step_fraction * norm(u) / speed : 0.0;
    bool forced = false;
    if (err > scale) {
      if (h > floor) {
        h = std::max(floor, h * std::max(0.1, 0.9 * std::pow(scale / err, 0.2)));
        if (h < 1e-14 * (1.0 + t)) throw Error("step size underflow at t = " + std::to_string(t));
        continue;
      }
      forced = true;
    }

    std::optional<Event> first;
    for (Termination kind : {Termination::HitInnerBall, Termination::ExceededRadius, Termination::ExitedOrthant}) {
      if (!fires(kind, fine, st)) continue;
      double lo = 0.0;
      double hi = h;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + t + h); ++it) {
        const double mid = 0.5 * (lo + hi);
        (fires(kind, rk4_fine(model, u, mid), st) ? hi : lo) = mid;
      }
      if (!first || hi < first->s) first = Event{kind, hi};
    }
    if (first) return finish(first->kind, t + first->s, rk4_fine(model, u, first->s));

    t = last ? st.t_max : t + h;
    u = fine;
    ++tr.steps;
    if (forced) ++tr.forced_steps;
    if (record) tr.samples.push_back({t, u});
    const double grow = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 2.0;
    if (!last) h *= std::clamp(grow, 1.0, 2.0);
  }
}

HittingTime hitting_time(const Model& model, const Vec& x, const FlowSettings& settings) {
  const Trajectory tr = integrate(model, x, settings, false);
  HittingTime out;
  out.termination = tr.termination;
  switch (tr.termination) {
    case Termination::HitInnerBall:
      out.kind = HittingTime::Kind::Time;
      out.time = tr.end_time;
      break;
    case Termination::ExceededRadius: out.kind = HittingTime::Kind::Divergent; break;
    default: out.kind = HittingTime::Kind::Undetermined; break;
  }
  return out;
}

FlowVerdict classify_smooth(const Model& model, const FlowSettings& settings) {
  require_smooth(model);
  settings.validate();
  const auto mesh = direction_mesh(dimension(model), settings.mesh, settings.icosphere_level);
  std::vector<Trajectory> runs(mesh.size());
  parallel_for(mesh.size(), [&](std::size_t i) { runs[i] = integrate(model, mesh[i], settings, false); }, settings.threads);

  FlowVerdict v;
  v.directions = mesh.size();
  double first_escape = settings.t_max;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    v.forced_steps += runs[i].forced_steps;
    switch (runs[i].termination) {
      case Termination::HitInnerBall:
        ++v.hit;
        if (runs[i].end_time >= v.sup_hitting_time) {
          v.sup_hitting_time = runs[i].end_time;
          v.worst_direction = mesh[i];
        }
        break;
      case Termination::ExceededRadius:
        ++v.exceeded;
        first_escape = std::min(first_escape, runs[i].end_time);
        break;
      case Termination::ExitedOrthant: ++v.exited; break;
      case Termination::Timeout: ++v.timeout; break;
    }
  }
  if (v.hit == mesh.size()) {
    v.label = Label::Stable;
    return v;
  }
  v.sup_hitting_time = 0.0;
  v.worst_direction.clear();
  if (v.hit > 0 || v.exited > 0) return v;

  // Every trajectory is alive until first_escape; measure |u(T)| there.
  const double T = first_escape;
  std::vector<double> radius(mesh.size());
  if (T >= settings.t_max) {
    for (std::size_t i = 0; i < runs.size(); ++i) radius[i] = norm(runs[i].end_state);
  } else {
    FlowSettings capped = settings;
    capped.t_max = T;
    parallel_for(mesh.size(), [&](std::size_t i) {
      const auto tr = integrate(model, mesh[i], capped, false);
      radius[i] = tr.termination == Termination::HitInnerBall ? 0.0 : norm(tr.end_state);
    }, settings.threads);
  }
  const auto worst = std::min_element(radius.begin(), radius.end()) - radius.begin();
  v.expansion_time = T;
  v.expansion_factor = radius[static_cast<std::size_t>(worst)];
  v.worst_direction = mesh[static_cast<std::size_t>(worst)];
  if (v.expansion_factor >= settings.unstable_margin) v.label = Label::Unstable;
  return v;
}

ScalingReport scaling_check(const Model& model, const FlowSettings& settings, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t d = dimension(model);
  ScalingReport rep;
  rep.factors = {2.0, 10.0};
  rep.per_factor.assign(rep.factors.size(), 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec x = random_orthant_direction(d, rng);
    FlowSettings base = settings;
    base.t_max = 0.5;
    Trajectory tx = integrate(model, x, base, false);
    for (int tries = 0; tries < 20 && tx.termination != Termination::Timeout; ++tries) {
      base.t_max = 0.5 * tx.end_time;
      if (!(base.t_max > 0.0)) break;
      tx = integrate(model, x, base, false);
    }
    if (tx.termination != Termination::Timeout) continue;
    for (std::size_t f = 0; f < rep.factors.size(); ++f) {
      const double K = rep.factors[f];
      FlowSettings scaled = base;
      scaled.t_max = K * base.t_max;
      scaled.kappa = std::min(0.5, settings.kappa * K);
      scaled.r_max = settings.r_max * K;
      scaled.h0 = settings.h0 * K;
      const Trajectory tk = integrate(model, K * x, scaled, false);
      const double dev = tk.termination == Termination::Timeout
                             ? norm(tk.end_state - K * tx.end_state) / (K * norm(tx.end_state))
                             : std::numeric_limits<double>::infinity();
      rep.per_factor[f] = std::max(rep.per_factor[f], dev);
    }
  }
  rep.max_deviation = *std::max_element(rep.per_factor.begin(), rep.per_factor.end());
  rep.passed = rep.max_deviation <= 1e-6;
  return rep;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const std::size_t d = trajectory.end_state.size();
  out << "t";
  for (std::size_t i = 0; i < d; ++i) out << ",u" << i + 1;
  out << ",norm\r\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (const auto& s : trajectory.samples) {
    out << num(s.t);
    for (double c : s.u) out << ',' << num(c);
    out << ',' << num(norm(s.u)) << "\r\n";
  }
}

}  // namespace bdstab
