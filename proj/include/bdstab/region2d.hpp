#pragma once

// Classification of 2D cone-partition drifts through the sets U^1 (drift
// pointing into its own cone) and U^2 (outward sliding along a ray), and the
// stability region in the arrival plane built from the psi-chain.

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "bdstab/drift_model.hpp"
#include "bdstab/scenario.hpp"
#include "bdstab/verdict.hpp"

namespace bdstab {

struct USetWitness {
  enum class Kind { U1, U2 };
  Kind kind = Kind::U1;
  std::size_t index = 0;   // 1-based: cone k for U1, ray k for U2
  double first = 0.0;      // A (U1) or alpha (U2)
  double second = 0.0;     // B (U1) or A (U2)
  bool strict = false;     // membership holds with every inequality strict at tol
};

/// 1 <= k <= N-1. Member iff delta^k = A v_k + B v_{k+1} with A, B >= -tol
/// and A + B > tol; on a degenerate cone, iff delta^k = A v_k with A > tol.
std::optional<USetWitness> membership_u1(const ConePartition2D& partition, std::size_t k, double tol = 1e-9);

/// 2 <= k <= N. Member iff alpha delta^k + (1 - alpha) delta^{k-1} = A v_k
/// with alpha in [0, 1] and A >= -tol. There is no delta^N, so k = N never
/// holds.
std::optional<USetWitness> membership_u2(const ConePartition2D& partition, std::size_t k, double tol = 1e-9);

struct RegionVerdict {
  Label label = Label::Inconclusive;
  std::optional<USetWitness> witness;  // strongest membership found
  std::vector<USetWitness> memberships;
};

/// Stable when no membership holds, Unstable when one holds strictly,
/// Boundary otherwise.
RegionVerdict classify_2d(const ConePartition2D& partition, double tol = 1e-9);

/// Vertices of the stability region in the arrival plane, origin first, then
/// counter-clockwise: lambda1-axis intercept, psi-chain, lambda2-axis intercept.
std::vector<Vec> region_polygon(const ArrivalFamily2D& family);

/// Throws Unsupported when the model's drift is not affine in an arrival
/// vector over a 2D cone partition.
std::vector<Vec> region_polygon(const Model& model);

/// Strict point-in-polygon test; points within `tube` of an edge return nullopt.
std::optional<bool> polygon_contains(const std::vector<Vec>& polygon, const Vec& p, double tube);

struct GridCell {
  Vec lambda;
  Label label;
};

struct RegionGrid {
  std::size_t n = 0;
  Vec lo, hi;
  double step1 = 0.0, step2 = 0.0;
  std::vector<GridCell> cells;  // row-major, lambda2 outer
};

RegionGrid sweep_region(const ArrivalFamily2D& family, const SweepSettings& sweep, double tol = 1e-9, unsigned threads = 0);

void write_grid_csv(std::ostream& out, const RegionGrid& grid);

/// Arrival-plane drawing: psi points, chain, cones at each psi, filled region,
/// optional classified grid.
void write_region_svg(std::ostream& out, const ArrivalFamily2D& family, const std::vector<Vec>& polygon,
                      const RegionGrid* grid = nullptr);

}  // namespace bdstab
