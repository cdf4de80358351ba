#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bdstab/errors.hpp"
#include "bdstab/gradient_system.hpp"
#include "fields.hpp"

using namespace bdstab;

namespace {

/// -int_0^1 <delta(s x), x> ds by composite Simpson.
double line_integral(const Model& m, const Vec& x, int n = 2000) {
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double s = std::max(static_cast<double>(k) / n, 1e-9);
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * dot(drift_at(m, s * x), x);
  }
  return -sum / (3.0 * n);
}

}  // namespace

TEST_SUITE("gradient_system") {

TEST_CASE("radial inflow is conservative with V = |x|") {
  const auto rep = is_conservative(fields::radial_in());
  CHECK(rep.conservative);
  CHECK(rep.determined);
  CHECK(rep.asymmetry <= 1e-6);
  CHECK(rep.samples == 200);
  CHECK(potential(fields::radial_in(), Vec{3.0, 4.0}) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("rotational field is not conservative") {
  const auto rep = is_conservative(fields::rotational());
  CHECK_FALSE(rep.conservative);
  // d1 delta2 - d2 delta1 = 1/|x| for (-x2, x1)/|x|
  CHECK(rep.asymmetry == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(Potential(fields::rotational()), ContractError);
  CHECK_THROWS_AS(potential(fields::rotational(), Vec{1.0, 1.0}), ContractError);
}

TEST_CASE("constant field has a linear potential") {
  const Model m = fields::constant({0.0, 0.0}, {1.0, 1.0});
  CHECK(is_conservative(m).conservative);
  CHECK(potential(m, Vec{2.0, 3.0}) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("potential is 1-homogeneous and matches the line integral") {
  const Potential V(fields::radial_in(3));
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const Vec x = random_orthant_direction(3, rng);
    CHECK(V(7.0 * x) == doctest::Approx(7.0 * V(x)).epsilon(1e-14));
    CHECK(std::abs(V(x) - line_integral(fields::radial_in(3), x)) <= 1e-8);
  }
}

TEST_CASE("polytope2 potential is the support-function difference") {
  const Scenario s = builtin_scenario("polytope2");
  const auto& law = std::get<PolytopeAllocation>(std::get<SmoothDrift>(s.model).law());
  const Potential V(s.model);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const Vec x = random_orthant_direction(2, rng);
    double hc = -1e300, ha = 1e300;
    for (const auto& c : law.capacity_vertices) hc = std::max(hc, dot(x, c));
    for (const auto& a : law.arrival_vertices) ha = std::min(ha, dot(x, a));
    CHECK(std::abs(V(x) - (hc - ha)) <= 1e-12);
  }
}

TEST_CASE("finite-difference gradient of V is -delta") {
  for (const Model& m : {fields::radial_in(), fields::constant({0.2, 0.1}, {1.0, 0.5})}) {
    const Potential V(m);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
      Vec x = random_orthant_direction(2, rng);
      if (std::min(x[0], x[1]) < 1e-3) continue;
      const Vec dlt = drift_at(m, x);
      for (std::size_t j = 0; j < 2; ++j) {
        Vec xp = x, xm = x;
        xp[j] += 1e-6;
        xm[j] -= 1e-6;
        CHECK(std::abs((V(xp) - V(xm)) / 2e-6 + dlt[j]) <= 1e-4);
      }
    }
  }
}

TEST_CASE("gradient criterion verdicts") {
  const auto mesh = direction_mesh(2, 720);
  const auto in = check_gradient_criterion(fields::radial_in(), mesh);
  CHECK(in.label == Label::Stable);
  CHECK(in.min_potential == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(in.min_speed == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(in.mesh_size == 720);

  const auto out = check_gradient_criterion(fields::radial_out(), mesh);
  CHECK(out.label == Label::Inconclusive);
  CHECK(out.conservative.conservative);
  CHECK(out.min_potential < 0.0);

  CHECK(check_gradient_criterion(fields::rotational(), mesh).label == Label::Inconclusive);
}

TEST_CASE("evaluation failures are counted and can leave the answer undetermined") {
  CoordinateRates r;
  r.births = {ConstantRate{0.0}, ConstantRate{0.0}};
  // undefined on the half of the sphere where x1 < x2
  r.deaths = {ExprRate("sqrt(x1 - x2) / sqrt(norm)"), ConstantRate{1.0}};
  const auto rep = is_conservative(SmoothDrift(2, r));
  CHECK(rep.skipped > 0);
  CHECK_FALSE(rep.determined);
  CHECK_FALSE(rep.conservative);
}

}
