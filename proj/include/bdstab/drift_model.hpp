#pragma once

// Process model: birth rates lambda(x), death rates phi(x) and the drift
// delta(x) = lambda(x) - phi(x) of a birth-and-death process on Z_+^d whose
// rates are 0-homogeneous (they depend on x only through x / |x|).
//
// Three families are supported:
//   * SupportPatternDrift: rates constant on each face of the orthant, i.e.
//     indexed by the set of strictly positive coordinates;
//   * ConeModel: 2D rates constant on angular cones, parameterized by an
//     arrival vector;
//   * SmoothDrift: per-coordinate rate functions (constants, Shannon-type
//     wireless rates, user expressions) or a polytope allocation policy.
//
// Deaths of coordinates that are zero are masked to 0 by default: an empty
// queue has no departures, and the effective drift on a boundary face only
// carries the birth term for the empty coordinate.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bdstab/rate_dsl.hpp"
#include "bdstab/vec.hpp"

namespace bdstab {

enum class Masking { Masked, Unmasked };

/// Bitmask of the strictly positive coordinates of a state (bit i <=> x_{i+1} > 0).
using Pattern = std::uint32_t;

Pattern support_of(std::span<const double> x);

inline bool in_pattern(Pattern p, std::size_t i) { return ((p >> i) & 1u) != 0; }

struct Rates {
  Vec birth;
  Vec death;

  Vec drift() const { return birth - death; }
};

/// Rates that are constant on each support pattern of the orthant.
class SupportPatternDrift {
 public:
  struct Entry {
    Pattern support;
    Vec births;
    Vec deaths;  // nominal rates; coordinates outside `support` are masked on evaluation
  };

  /// `entries` must list every non-empty pattern exactly once. `origin_births`
  /// are the arrival rates in the empty state; when empty, the births of the
  /// full pattern are used.
  SupportPatternDrift(std::size_t dimension, std::vector<Entry> entries, Vec origin_births = {});

  std::size_t dimension() const { return dimension_; }
  std::size_t pattern_count() const { return births_.size(); }

  const Vec& births(Pattern p) const { return births_.at(p); }
  const Vec& nominal_deaths(Pattern p) const { return deaths_.at(p); }
  Vec deaths(Pattern p, Masking masking = Masking::Masked) const;
  Vec drift(Pattern p, Masking masking = Masking::Masked) const;

  Pattern full_pattern() const { return static_cast<Pattern>(births_.size() - 1); }

  std::vector<Entry> entries() const;

  friend bool operator==(const SupportPatternDrift&, const SupportPatternDrift&) = default;

 private:
  std::size_t dimension_;
  std::vector<Vec> births_;  // indexed by pattern; [0] holds the origin births
  std::vector<Vec> deaths_;  // indexed by pattern; [0] unused (all zero)
};

/// Ordered rays v_1 = e_1, ..., v_N = e_2 in the plane with per-cone birth
/// vectors and effective (masked) death vectors psi_k. Cone k spans
/// (v_k, v_{k+1}); consecutive equal rays encode a cone degenerated to a ray.
class ConePartition2D {
 public:
  ConePartition2D(std::vector<Vec> rays, std::vector<Vec> births, std::vector<Vec> deaths);

  std::size_t ray_count() const { return rays_.size(); }
  std::size_t cone_count() const { return births_.size(); }

  const std::vector<Vec>& rays() const { return rays_; }
  const Vec& ray(std::size_t k) const { return rays_.at(k); }
  const Vec& births(std::size_t cone) const { return births_.at(cone); }
  const Vec& deaths(std::size_t cone) const { return deaths_.at(cone); }
  Vec drift(std::size_t cone) const { return births_.at(cone) - deaths_.at(cone); }

  bool degenerate(std::size_t cone) const;

  /// 0-based index of the cone containing direction x (x != 0, x >= 0). A
  /// point on a ray between two non-degenerate cones belongs to the cone
  /// starting at that ray; the positive axes belong to the first and last cone.
  std::size_t cone_of(std::span<const double> x) const;

  /// Cone used for the empty state: the one containing the diagonal.
  std::size_t origin_cone() const;

  friend bool operator==(const ConePartition2D&, const ConePartition2D&) = default;

 private:
  std::vector<Vec> rays_;
  std::vector<Vec> births_;
  std::vector<Vec> deaths_;
};

/// Cone partitions parameterized by an arrival vector lambda: births of cone k
/// are lambda + extra_k, deaths are psi_k. The drift is affine in lambda,
/// delta^k = lambda - anchor_k with anchor_k = psi_k - extra_k.
class ArrivalFamily2D {
 public:
  ArrivalFamily2D(std::vector<Vec> rays, std::vector<Vec> deaths, std::vector<Vec> extra_births);

  ConePartition2D at(const Vec& lambda) const;

  std::size_t cone_count() const { return deaths_.size(); }
  const std::vector<Vec>& rays() const { return rays_; }
  const std::vector<Vec>& deaths() const { return deaths_; }
  const std::vector<Vec>& extra_births() const { return extras_; }

  /// Point of the lambda-plane where the drift of cone k vanishes.
  Vec anchor(std::size_t cone) const { return deaths_.at(cone) - extras_.at(cone); }

  friend bool operator==(const ArrivalFamily2D&, const ArrivalFamily2D&) = default;

 private:
  std::vector<Vec> rays_;
  std::vector<Vec> deaths_;
  std::vector<Vec> extras_;
};

struct ConeModel {
  ArrivalFamily2D family;
  Vec lambda;

  ConePartition2D partition() const { return family.at(lambda); }

  friend bool operator==(const ConeModel&, const ConeModel&) = default;
};

struct ConstantRate {
  double value = 0.0;
  friend bool operator==(const ConstantRate&, const ConstantRate&) = default;
};

/// phi_i(x) = log(1 + (x_i/|x|) / (noise + sum_{j != i} x_j/|x|)).
struct ShannonRate {
  std::size_t coordinate = 0;  // 0-based
  double noise = 0.1;
  friend bool operator==(const ShannonRate&, const ShannonRate&) = default;
};

struct ExprRate {
  std::string text;
  RateExpr expr;

  explicit ExprRate(std::string source);
  friend bool operator==(const ExprRate& a, const ExprRate& b) { return a.expr == b.expr; }
};

using RateFn = std::variant<ConstantRate, ShannonRate, ExprRate>;

double evaluate_rate(const RateFn& fn, std::span<const double> x);

struct CoordinateRates {
  std::vector<RateFn> births;
  std::vector<RateFn> deaths;
  friend bool operator==(const CoordinateRates&, const CoordinateRates&) = default;
};

/// Allocation policy over polytopes given by their vertices: the service
/// vector maximizes <x, c> over the capacity vertices, the arrival vector
/// minimizes <x, a> over the arrival vertices; ties go to the lowest index.
struct PolytopeAllocation {
  std::vector<Vec> arrival_vertices;
  std::vector<Vec> capacity_vertices;
  friend bool operator==(const PolytopeAllocation&, const PolytopeAllocation&) = default;
};

class SmoothDrift {
 public:
  using Law = std::variant<CoordinateRates, PolytopeAllocation>;

  SmoothDrift(std::size_t dimension, Law law);

  std::size_t dimension() const { return dimension_; }
  const Law& law() const { return law_; }

  /// Unvalidated evaluation at x != 0 (used by inner loops after checking).
  Rates rates(std::span<const double> x, Masking masking = Masking::Masked) const;

  friend bool operator==(const SmoothDrift&, const SmoothDrift&) = default;

 private:
  std::size_t dimension_;
  Law law_;
};

using Model = std::variant<SupportPatternDrift, ConeModel, SmoothDrift>;

std::size_t dimension(const Model& model);
std::string family_name(const Model& model);

/// Birth and (masked) death rates at a state of the closed orthant minus the
/// origin. Throws DomainError on the origin or a negative coordinate.
Rates rates_at(const Model& model, std::span<const double> x, Masking masking = Masking::Masked);

/// delta(x) = lambda(x) - phi(x). Throws DomainError on the origin or a
/// negative coordinate.
Vec drift_at(const Model& model, std::span<const double> x, Masking masking = Masking::Masked);

/// Birth rates used by the simulator in the empty state.
Vec origin_births(const Model& model);

/// Emits the 3-cone partition (axis e1, open quadrant, axis e2) of a 2D
/// support-pattern model with masked death vectors. Throws DimensionError
/// when d != 2.
ConePartition2D cones_from_support(const SupportPatternDrift& model);

/// Arrival family of a 2D support-pattern model, with the reference arrival
/// vector taken as the births of the full pattern.
ArrivalFamily2D family_from_support(const SupportPatternDrift& model);

/// Arrival family of a model, when the model's drift is affine in an arrival
/// vector over a 2D cone partition.
std::optional<ArrivalFamily2D> arrival_family(const Model& model);

/// The arrival vector a model is parameterized by, when it has one.
std::optional<Vec> arrival_vector(const Model& model);

/// Copy of `model` with its arrival vector replaced. Throws Unsupported when
/// the model has no arrival parameterization.
Model with_arrivals(const Model& model, const Vec& lambda);

struct HomogeneityReport {
  bool passed = true;
  double max_deviation = 0.0;  // max |delta(a x) - delta(x)| / (1 + |delta(x)|)
  Vec witness;                 // worst sample direction
  double witness_scale = 1.0;
};

/// Checks delta(a x) = delta(x) for a in {0.5, 2, 10} on random unit
/// directions of the orthant, to 1e-9 * (1 + |delta(x)|).
HomogeneityReport check_homogeneity(const Model& model, std::size_t samples = 200, std::uint64_t seed = 7);

/// Evaluates every rate at random unit directions; throws HomogeneityError,
/// EvalError or DomainError with the offending sample when the model is not
/// 0-homogeneous, fails to evaluate, or yields a negative rate.
void validate_model(const Model& model, std::size_t smoke_samples = 1000, std::uint64_t seed = 11);

/// Max |delta| over random unit directions (exact maximum over faces or cones
/// for piecewise-constant models).
double drift_bound(const Model& model, std::size_t samples = 1000, std::uint64_t seed = 13);

/// Uniform random point on the unit sphere restricted to the closed orthant.
Vec random_orthant_direction(std::size_t dimension, std::mt19937_64& rng);

/// Deterministic mesh of unit directions in the closed orthant: `resolution`
/// equally spaced angles in 2D; icosphere vertices at `icosphere_level` in 3D;
/// normalized simplex-lattice points in higher dimension.
std::vector<Vec> direction_mesh(std::size_t dimension, std::size_t resolution, int icosphere_level = 4);

}  // namespace bdstab
