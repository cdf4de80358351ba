#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bdstab/cone_geometry.hpp"
#include "bdstab/errors.hpp"
#include "bdstab/region2d.hpp"

using namespace bdstab;

namespace {

ConePartition2D coupled2_cones(Vec lambda, Vec a = {0.6, 0.6}) {
  const Scenario s = builtin_scenario("coupled2", {{"lambda", lambda}, {"a", a}});
  return cones_from_support(std::get<SupportPatternDrift>(s.model));
}

ArrivalFamily2D coupled2_family(Vec a) {
  const Scenario s = builtin_scenario("coupled2", {{"a", a}});
  return *arrival_family(s.model);
}

bool closed_form_stable(double l1, double l2, double a1, double a2) {
  return (l1 < a1 && l2 < 1.0 - (l1 / a1) * (1.0 - a2)) || (l2 < a2 && l1 < 1.0 - (l2 / a2) * (1.0 - a1));
}

}  // namespace

TEST_SUITE("region2d") {

TEST_CASE("U1 membership") {
  const auto hot = coupled2_cones({0.7, 0.8});
  const auto w = membership_u1(hot, 2);
  REQUIRE(w);
  CHECK(w->kind == USetWitness::Kind::U1);
  // delta = (0.1, 0.2) = 0.1 e1 + 0.2 e2
  CHECK(w->first == doctest::Approx(0.1));
  CHECK(w->second == doctest::Approx(0.2));
  CHECK(w->strict);

  CHECK_FALSE(membership_u1(coupled2_cones({0.3, 0.3}), 2));
  // axis cone with delta (-0.5, 0.9) is not collinear with e1
  CHECK_FALSE(membership_u1(coupled2_cones({0.5, 0.9}), 1));
}

TEST_CASE("U2 membership") {
  const auto w = membership_u2(coupled2_cones({0.5, 0.9}), 3);
  REQUIRE(w);
  CHECK(w->kind == USetWitness::Kind::U2);
  CHECK(std::abs(w->first - 1.0 / 6.0) <= 1e-12);
  CHECK(std::abs(w->second - 7.0 / 30.0) <= 1e-12);
  // on e1 at lambda = (0.7, 0.3) the sliding speed is -0.1
  CHECK_FALSE(membership_u2(coupled2_cones({0.7, 0.3}), 2));
  // no cone beyond the last ray
  CHECK_FALSE(membership_u2(coupled2_cones({0.5, 0.9}), 4));
}

TEST_CASE("identical outward drifts on both sides of a ray") {
  const Vec e1{1, 0}, e2{0, 1}, d{1, 1};
  // both cones next to the diagonal drift straight out along it
  const ConePartition2D p({e1, d, e2}, {{0.5, 0.5}, {0.5, 0.5}}, {{0, 0}, {0, 0}});
  const auto w = membership_u2(p, 2);
  REQUIRE(w);
  CHECK(w->first == 0.5);
  CHECK(w->second > 0.0);
}

TEST_CASE("classification examples") {
  CHECK(classify_2d(coupled2_cones({0.3, 0.3})).label == Label::Stable);
  const auto u = classify_2d(coupled2_cones({0.5, 0.9}));
  CHECK(u.label == Label::Unstable);
  REQUIRE(u.witness);
  CHECK(u.witness->kind == USetWitness::Kind::U2);
  CHECK(u.witness->index == 3);
  CHECK(classify_2d(coupled2_cones({0.7, 0.3})).label == Label::Stable);
  CHECK(classify_2d(coupled2_cones({1.3, 1.3})).label == Label::Unstable);
  CHECK(classify_2d(coupled2_family({0.6, 0.6}).at({0.0, 0.0})).label == Label::Stable);
  // exactly on the boundary lambda2 = 2/3 at lambda1 = 0.5: A = 0, not strict
  const auto b = classify_2d(coupled2_cones({0.5, 2.0 / 3.0}), 1e-9);
  CHECK(b.label == Label::Boundary);
}

TEST_CASE("complementarity: Stable never coexists with a membership") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.3);
  for (int i = 0; i < 500; ++i) {
    const auto part = coupled2_cones({u(rng), u(rng)});
    const auto v = classify_2d(part);
    bool any = false;
    for (std::size_t k = 1; k < part.ray_count(); ++k) any = any || membership_u1(part, k).has_value();
    for (std::size_t k = 2; k <= part.ray_count(); ++k) any = any || membership_u2(part, k).has_value();
    CHECK((v.label == Label::Stable) == !any);
  }
}

TEST_CASE("verdicts are invariant under scaling of all rates") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.01, 1.2);
  for (int i = 0; i < 200; ++i) {
    const Vec l{u(rng), u(rng)}, a{std::min(u(rng), 0.99), std::min(u(rng), 0.99)};
    const auto base = coupled2_cones(l, a);
    std::vector<Vec> births, deaths;
    for (std::size_t k = 0; k < base.cone_count(); ++k) {
      births.push_back(3.0 * base.births(k));
      deaths.push_back(3.0 * base.deaths(k));
    }
    const ConePartition2D scaled(base.rays(), births, deaths);
    const auto v1 = classify_2d(base).label, v2 = classify_2d(scaled).label;
    if (v1 != Label::Boundary && v2 != Label::Boundary) CHECK(v1 == v2);
  }
}

TEST_CASE("U2 speed on e2 is the fluid drift of the coupled pair") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  int checked = 0;
  for (int i = 0; i < 50; ++i) {
    const double a1 = u(rng), a2 = u(rng);
    const double l1 = a1 * u(rng), l2 = u(rng);
    const auto part = coupled2_cones({l1, l2}, {a1, a2});
    const auto s = solve_sliding(part.drift(2), part.drift(1), part.ray(2));
    REQUIRE(s);
    const double pi0 = 1.0 - l1 / a1;
    CHECK(s->A == doctest::Approx(pi0 * (l2 - 1.0) + (1.0 - pi0) * (l2 - a2)).epsilon(1e-12));
    CHECK(s->A == doctest::Approx(l2 - ((1.0 - l1 / a1) + a2 * l1 / a1)).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("coupled2 region polygon") {
  const auto poly = region_polygon(coupled2_family({0.6, 0.6}));
  REQUIRE(poly.size() == 4);
  const Vec want[] = {{0, 0}, {1, 0}, {0.6, 0.6}, {0, 1}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(poly[i][0] - want[i][0]) <= 1e-9);
    CHECK(std::abs(poly[i][1] - want[i][1]) <= 1e-9);
  }
  const auto square = region_polygon(coupled2_family({1.0, 1.0}));
  REQUIRE(square.size() == 4);
  CHECK(square[2] == Vec{1.0, 1.0});
  CHECK_THROWS_AS(region_polygon(builtin_scenario("shannon2").model), Unsupported);
}

TEST_CASE("point-in-polygon with a tube") {
  const std::vector<Vec> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polygon_contains(sq, {0.5, 0.5}, 1e-9) == true);
  CHECK(polygon_contains(sq, {1.5, 0.5}, 1e-9) == false);
  CHECK_FALSE(polygon_contains(sq, {1.0, 0.5}, 1e-9).has_value());
  CHECK_FALSE(polygon_contains(sq, {0.5, 1e-12}, 1e-9).has_value());
}

TEST_CASE("sweep agrees with the closed form and the polygon") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int t = 0; t < 5; ++t) {
    const double a1 = u(rng), a2 = u(rng);
    const auto family = coupled2_family({a1, a2});
    const auto poly = region_polygon(family);
    SweepSettings sw;
    sw.grid = 25;
    const auto grid = sweep_region(family, sw);
    REQUIRE(grid.cells.size() == 625);
    const double tube = grid.step1;
    for (const auto& c : grid.cells) {
      const auto inside = polygon_contains(poly, c.lambda, tube);
      if (!inside) continue;
      CHECK(c.label == (*inside ? Label::Stable : Label::Unstable));
      CHECK(*inside == closed_form_stable(c.lambda[0], c.lambda[1], a1, a2));
    }
  }
}

TEST_CASE("jsq2 sweep satisfies the published conditions") {
  const Scenario s = builtin_scenario("jsq2", {{"nu", {0.2}}, {"a", {0.5, 0.5}}});
  const auto family = *arrival_family(s.model);
  const auto poly = region_polygon(family);
  CHECK(poly.front() == Vec{0.0, 0.0});
  SweepSettings sw;
  sw.grid = 31;
  const auto grid = sweep_region(family, sw);
  const double a1 = 0.5, a2 = 0.5, nu = 0.2;
  for (const auto& c : grid.cells) {
    const double l1 = c.lambda[0], l2 = c.lambda[1];
    const auto inside = polygon_contains(poly, c.lambda, grid.step1);
    if (inside) CHECK(c.label == (*inside ? Label::Stable : Label::Unstable));
    if (c.label != Label::Stable) continue;
    if (!inside) continue;
    // each ordering case that applies needs one of its two alternatives
    const bool case12 = l1 - a1 > nu + l2 - a2;
    const bool case21 = l2 - a2 > nu + l1 - a1;
    const bool cond12 = (l2 + nu < a2 && l1 < 1.0 + (a1 - 1.0) / a2 * (l2 + nu)) ||
                        (l2 + nu > a2 + l1 - a1 && l2 - a2 < nu);
    const bool cond21 = (l1 + nu < a1 && l2 < 1.0 + (a2 - 1.0) / a1 * (l1 + nu)) ||
                        (l1 + nu > a1 + l2 - a2 && l1 - a1 < nu);
    CHECK((!case12 || cond12));
    CHECK((!case21 || cond21));
    if (!case12 && !case21) CHECK((cond12 || cond21));
  }
}

TEST_CASE("grid CSV and SVG") {
  const auto family = coupled2_family({0.6, 0.6});
  SweepSettings sw;
  sw.grid = 3;
  const auto grid = sweep_region(family, sw);
  std::ostringstream csv;
  write_grid_csv(csv, grid);
  CHECK(csv.str().rfind("lambda1,lambda2,verdict\r\n0,0,stable\r\n", 0) == 0);
  std::ostringstream svg;
  write_region_svg(svg, family, region_polygon(family), &grid);
  CHECK(svg.str().find("<svg") != std::string::npos);
  CHECK(svg.str().find("</svg>") != std::string::npos);
}

}
