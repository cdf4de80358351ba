#pragma once

// Fluid flow du/dt = delta(u) for smooth 0-homogeneous drifts, hitting times
// of the inner ball, and the sup-hitting-time / expansion classification.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "bdstab/drift_model.hpp"
#include "bdstab/scenario.hpp"
#include "bdstab/verdict.hpp"

namespace bdstab {

enum class Termination { HitInnerBall, ExceededRadius, ExitedOrthant, Timeout };

std::string to_string(Termination t);

struct Sample {
  double t;
  Vec u;
};

struct Trajectory {
  std::vector<Sample> samples;  // empty unless recording was requested
  Termination termination = Termination::Timeout;
  double end_time = 0.0;
  Vec end_state;
  std::size_t exit_coordinate = 0;  // ExitedOrthant only, 0-based
  std::size_t steps = 0;
  std::size_t forced_steps = 0;  // accepted at the step floor with the error above tolerance
};

/// Adaptive RK4 (step doubling) with bisection on the events |u| = kappa,
/// |u| = r_max and min_i u_i = 0. Stops at the first event or at t_max.
Trajectory integrate(const Model& model, const Vec& x0, const FlowSettings& settings, bool record = true);

struct HittingTime {
  enum class Kind { Time, Divergent, Undetermined };
  Kind kind = Kind::Undetermined;
  double time = 0.0;  // meaningful for Kind::Time
  Termination termination = Termination::Timeout;
};

/// T_{x,kappa}: first time |u^x(t)| <= kappa.
HittingTime hitting_time(const Model& model, const Vec& x, const FlowSettings& settings);

struct FlowVerdict {
  Label label = Label::Inconclusive;
  double sup_hitting_time = 0.0;  // Stable certificate
  double expansion_time = 0.0;    // Unstable certificate (T, a)
  double expansion_factor = 0.0;
  Vec worst_direction;
  std::size_t directions = 0;
  std::size_t hit = 0;
  std::size_t exceeded = 0;
  std::size_t exited = 0;
  std::size_t timeout = 0;
  std::size_t forced_steps = 0;  // nonzero when the field was discontinuous along some path
};

/// Integrates from every mesh direction of the unit sphere. Stable when all
/// hit the inner ball; Unstable when at a common time T every |u^x(T)| is at
/// least settings.unstable_margin; Inconclusive otherwise.
FlowVerdict classify_smooth(const Model& model, const FlowSettings& settings);

struct ScalingReport {
  bool passed = false;
  double max_deviation = 0.0;  // max |u^{Kx}(Kt) - K u^x(t)| / (K |u^x(t)|)
  std::vector<double> per_factor;  // deviation for each K
  std::vector<double> factors;
};

/// Checks u^{Kx}(Kt) = K u^x(t) for K in {2, 10} on `samples` random x.
ScalingReport scaling_check(const Model& model, const FlowSettings& settings, std::size_t samples = 20,
                            std::uint64_t seed = 5);

/// CSV with header t,u1..ud,norm.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace bdstab
