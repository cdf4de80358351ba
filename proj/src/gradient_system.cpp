#include "bdstab/gradient_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bdstab/errors.hpp"

namespace bdstab {

ConservativeReport is_conservative(const Model& model, const GradientSettings& settings) {
  const std::size_t d = dimension(model);
  std::mt19937_64 rng(settings.seed);
  ConservativeReport rep;
  rep.samples = settings.samples;
  for (std::size_t s = 0; s < settings.samples; ++s) {
    Vec x;
    do {
      x = random_orthant_direction(d, rng);
    } while (*std::min_element(x.begin(), x.end()) < 100.0 * settings.fd_step);
    const double h = settings.fd_step * norm(x);
    try {
      // jac[i][j] = d delta_j / d x_i
      std::vector<Vec> jac(d);
      for (std::size_t i = 0; i < d; ++i) {
        Vec xp = x;
        Vec xm = x;
        xp[i] += h;
        xm[i] -= h;
        jac[i] = (1.0 / (2.0 * h)) * (drift_at(model, xp) - drift_at(model, xm));
      }
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
          const double a = std::abs(jac[i][j] - jac[j][i]);
          if (a > rep.asymmetry) {
            rep.asymmetry = a;
            rep.witness = x;
          }
        }
    } catch (const Error&) {
      ++rep.skipped;
    }
  }
  rep.determined = rep.skipped * 20 <= rep.samples;
  rep.conservative = rep.determined && rep.asymmetry <= settings.tol;
  return rep;
}

Potential::Potential(Model model, const GradientSettings& settings)
    : model_(std::move(model)), report_(is_conservative(model_, settings)) {
  if (!report_.conservative) {
    throw ContractError("potential requested for a non-conservative drift (asymmetry " + std::to_string(report_.asymmetry) + ")");
  }
}

double Potential::operator()(const Vec& x) const { return -dot(x, drift_at(model_, x)); }

double potential(const Model& model, const Vec& x, const GradientSettings& settings) {
  return Potential(model, settings)(x);
}

GradientVerdict check_gradient_criterion(const Model& model, const std::vector<Vec>& mesh, const GradientSettings& settings) {
  GradientVerdict v;
  v.conservative = is_conservative(model, settings);
  v.mesh_size = mesh.size();
  v.min_potential = std::numeric_limits<double>::infinity();
  v.min_speed = std::numeric_limits<double>::infinity();
  for (const auto& x : mesh) {
    const Vec dx = drift_at(model, x);
    const double V = -dot(x, dx);
    if (V < v.min_potential) {
      v.min_potential = V;
      v.argmin_potential = x;
    }
    v.min_speed = std::min(v.min_speed, norm(dx));
  }
  if (v.conservative.conservative && v.min_potential > settings.positivity && v.min_speed > settings.positivity) {
    v.label = Label::Stable;
  }
  return v;
}

}  // namespace bdstab
