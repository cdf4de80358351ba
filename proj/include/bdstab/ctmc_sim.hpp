#pragma once

// Event-driven simulation of the lattice birth-and-death chain.
//
// Generator: std::mt19937_64 seeded per replica with splitmix64(seed, index).
// Uniforms are (u >> 11) * 2^-53 shifted by half an ulp so that they lie in
// (0, 1); sojourns are -log(u) / total_rate; the event is chosen by a
// cumulative scan over births 1..d then deaths 1..d.

#include <cstdint>
#include <ostream>
#include <vector>

#include "bdstab/drift_model.hpp"
#include "bdstab/scenario.hpp"
#include "bdstab/verdict.hpp"

namespace bdstab {

using SimConfig = SimSettings;
using LatticeState = std::vector<std::int64_t>;

inline constexpr const char* kGeneratorId = "mt19937_64/splitmix64-seeded";

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica);

struct TracePoint {
  double t;
  LatticeState x;
};

struct SimSummary {
  std::uint64_t seed = 0;  // replica seed actually used
  LatticeState end_state;
  double time = 0.0;
  std::uint64_t events = 0;
  Vec slope;                 // X_T,i / T
  double slope_norm = 0.0;   // |X_T| / T
  std::uint64_t returns = 0; // entries into {|x| <= r} from outside
  double mean_return_time = 0.0;  // mean excursion length outside the ball
  double compact_radius = 0.0;
  Vec occupancy;             // time share per support pattern, indexed by pattern
  bool absorbed = false;     // reached a state with zero total rate
  std::vector<TracePoint> trace;
};

SimSummary simulate(const Model& model, const SimConfig& config, std::uint64_t replica = 0);

struct RecurrenceEstimate {
  Empirical label = Empirical::Inconclusive;
  double median_slope = 0.0;  // median over replicas of |X_T| / T
  Vec median_coordinate_slope;
  std::uint64_t min_returns = 0;
  std::vector<SimSummary> replicas;
};

/// Stable when the median slope is at most slope_lo and every replica
/// returned to the compact set; Unstable when every replica's slope is at
/// least slope_hi.
RecurrenceEstimate estimate_recurrence(const Model& model, const SimConfig& config);

struct PinnedOccupancy {
  std::size_t pinned = 0;        // 0-based coordinate held positive
  std::size_t free[2] = {0, 0};  // the two remaining coordinates
  // time shares indexed by (free[0] > 0) | (free[1] > 0) << 1:
  // [0] = pi00, [1] = pi10, [2] = pi01, [3] = pi11
  Vec pi;
  Vec drift_component;  // delta_k at each pattern joined with the pinned coordinate
  double lhs = 0.0;     // sum_P pi_P delta_k^{P u {k}}
  bool reliable = true;
  RecurrenceEstimate estimate;
};

/// Simulates the 2D process of the free coordinates with the 3D rates taken
/// as if coordinate k were always positive, and assembles the boundary
/// condition for coordinate k from its occupancies.
PinnedOccupancy pinned_face_occupancy(const SupportPatternDrift& model, std::size_t k, const SimConfig& config);

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace);

}  // namespace bdstab
