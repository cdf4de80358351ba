#pragma once

// Conservative drifts delta = -grad V and the explicit-potential criterion.
// For a 0-homogeneous conservative field V is 1-homogeneous, so Euler's
// identity gives V(x) = -<x, delta(x)>.

#include <cstddef>

#include "bdstab/drift_model.hpp"
#include "bdstab/scenario.hpp"
#include "bdstab/verdict.hpp"

namespace bdstab {

struct ConservativeReport {
  bool conservative = false;
  bool determined = true;     // false when more than 5% of samples failed to evaluate
  double asymmetry = 0.0;     // max |d_i delta_j - d_j delta_i|
  Vec witness;                // sample attaining the asymmetry
  std::size_t samples = 0;
  std::size_t skipped = 0;
};

/// Central finite differences (relative step settings.fd_step) at
/// settings.samples random points of the unit sphere in the open orthant.
ConservativeReport is_conservative(const Model& model, const GradientSettings& settings = {});

/// V(x) = -<x, delta(x)> for a model already shown conservative.
class Potential {
 public:
  /// Throws ContractError when `model` is not conservative.
  explicit Potential(Model model, const GradientSettings& settings = {});

  double operator()(const Vec& x) const;
  const ConservativeReport& report() const { return report_; }

 private:
  Model model_;
  ConservativeReport report_;
};

/// Checks conservativeness on every call; prefer Potential for repeated use.
double potential(const Model& model, const Vec& x, const GradientSettings& settings = {});

struct GradientVerdict {
  Label label = Label::Inconclusive;
  ConservativeReport conservative;
  double min_potential = 0.0;  // over the mesh
  double min_speed = 0.0;      // min |delta| over the mesh
  Vec argmin_potential;
  std::size_t mesh_size = 0;
};

/// Stable iff conservative, min V > 0 and min |delta| > 0 over the mesh;
/// never Unstable.
GradientVerdict check_gradient_criterion(const Model& model, const std::vector<Vec>& mesh,
                                         const GradientSettings& settings = {});

}  // namespace bdstab
