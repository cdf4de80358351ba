#pragma once

// Separating vectors, cone membership and sliding coefficients for
// piecewise-constant drifts.

#include <cstddef>
#include <optional>
#include <vector>

#include "bdstab/drift_model.hpp"
#include "bdstab/scenario.hpp"

namespace bdstab {

struct Separator {
  bool feasible = false;  // margin > a_min
  Vec eta;                // normalized to |eta|_inf = 1 when non-zero
  double margin = 0.0;    // optimal s of max s : <eta, v> <= -s, v in D u {-x}
};

/// LP over |eta|_inf <= 1. Throws DomainError on a zero vector in D or x = 0.
Separator farkas_separator(const std::vector<Vec>& D, const Vec& x, double a_min = 1e-9);

struct ConeMembership {
  bool inside = false;
  Vec coefficients;  // non-negative
  double residual = 0.0;
};

/// Non-negative least squares (Lawson-Hanson). Inside iff the residual is at
/// most 1e-9 |x|.
ConeMembership in_cone(const std::vector<Vec>& D, const Vec& x);

struct SlidingSolution {
  double alpha = 0.0;
  double A = 0.0;
  bool degenerate = false;  // both drifts collinear with v
  double residual = 0.0;
};

/// Solves alpha da + (1 - alpha) db = A v in 2D. Returns nullopt when no
/// solution with alpha in [0, 1] exists. When da = db is collinear with v the
/// convention alpha = 0.5 is used; when both are collinear with v but differ,
/// the endpoint with the larger A is reported.
std::optional<SlidingSolution> solve_sliding(const Vec& da, const Vec& db, const Vec& v);

/// Unit directions sampled inside the open face {x_i > 0 iff i in face}.
std::vector<Vec> face_directions(std::size_t dimension, Pattern face, std::size_t resolution);

struct FaceSeparation {
  Pattern face = 0;
  bool holds = false;
  std::size_t directions = 0;
  std::vector<Vec> etas;          // one per direction while the face holds
  std::optional<Vec> failing_direction;
  double min_margin = 0.0;
  Vec worst_eta;                  // eta at the smallest margin
};

/// Assumption A1 on one face of a support-pattern model, with
/// D = {delta^{S u T} : T disjoint from S}.
FaceSeparation a1_holds(const SupportPatternDrift& model, Pattern face, std::size_t resolution, double a_min = 1e-9);

struct SeparationReport {
  bool holds = false;
  std::vector<FaceSeparation> faces;
};

/// A1 on every non-empty face.
SeparationReport a1_all_faces(const SupportPatternDrift& model, const SeparationSettings& settings = {});

}  // namespace bdstab
