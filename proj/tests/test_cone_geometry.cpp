#include <doctest.h>

#include <cmath>
#include <random>

#include "bdstab/cone_geometry.hpp"
#include "bdstab/errors.hpp"

using namespace bdstab;

namespace {

Model coupled2_at(Vec lambda) { return builtin_scenario("coupled2", {{"lambda", lambda}, {"a", {0.6, 0.6}}}).model; }

void check_separates(const Separator& s, const std::vector<Vec>& D, const Vec& x) {
  REQUIRE(s.feasible);
  CHECK(norm_inf(s.eta) == doctest::Approx(1.0));
  for (const auto& v : D) CHECK(dot(s.eta, v) <= -s.margin + 1e-12);
  CHECK(-dot(s.eta, x) <= -s.margin + 1e-12);
}

}  // namespace

TEST_SUITE("cone_geometry") {

TEST_CASE("orthogonal separation") {
  const std::vector<Vec> D{{1, 0}};
  const Vec x{0, 1};
  const auto s = farkas_separator(D, x);
  check_separates(s, D, x);
  // eta proportional to (-1, 1)
  CHECK(s.eta[0] == doctest::Approx(-1.0));
  CHECK(s.eta[1] == doctest::Approx(1.0));
  CHECK(s.margin == doctest::Approx(1.0));
}

TEST_CASE("x inside cone(D) has no separator") {
  const std::vector<Vec> D{{1, 0}, {0, 1}};
  CHECK_FALSE(farkas_separator(D, Vec{1, 1}).feasible);
  const auto c = in_cone(D, Vec{2, 3});
  CHECK(c.inside);
  CHECK(c.coefficients[0] == doctest::Approx(2.0));
  CHECK(c.coefficients[1] == doctest::Approx(3.0));
  CHECK_FALSE(in_cone({{-1, 0}}, Vec{1, 0}).inside);
}

TEST_CASE("coupled2 drifts on the e2 face") {
  const std::vector<Vec> D{{0.5, -0.1}, {-0.1, 0.3}};
  const Vec x{0, 1};
  CHECK_FALSE(farkas_separator(D, x).feasible);
  const auto c = in_cone(D, x);
  CHECK(c.inside);
  // a (0.5, -0.1) + b (-0.1, 0.3) = (0, 1)
  CHECK(c.coefficients[0] == doctest::Approx(1.0 / 1.4).epsilon(1e-9));
  CHECK(c.coefficients[1] == doctest::Approx(5.0 / 1.4).epsilon(1e-9));
  CHECK(c.residual <= 1e-9);
}

TEST_CASE("degenerate inputs") {
  CHECK_THROWS_AS(farkas_separator({{0, 0}}, Vec{1, 0}), DomainError);
  CHECK_THROWS_AS(farkas_separator({{1, 0}}, Vec{0, 0}), DomainError);
}

TEST_CASE("separator verdict is invariant under rescaling") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 300; ++t) {
    std::vector<Vec> D(3, Vec(2));
    for (auto& v : D) v = {g(rng), g(rng)};
    const Vec x{std::abs(g(rng)), std::abs(g(rng))};
    const auto base = farkas_separator(D, x);
    std::vector<Vec> D2;
    for (const auto& v : D) D2.push_back(3.5 * v);
    const auto scaled = farkas_separator(D2, 0.25 * x);
    if (base.margin > 1e-6 || base.margin < -1e-6) CHECK(base.feasible == scaled.feasible);
    if (base.feasible) check_separates(base, D, x);
  }
}

TEST_CASE("sliding coefficients") {
  {
    const auto s = solve_sliding({0.5, -0.1}, {-0.1, 0.3}, {0, 1});
    REQUIRE(s);
    CHECK(std::abs(s->alpha - 1.0 / 6.0) <= 1e-12);
    CHECK(std::abs(s->A - 7.0 / 30.0) <= 1e-12);
    CHECK(s->residual <= 1e-12);
  }
  {
    const auto s = solve_sliding({-0.3, 0.3}, {0.1, -0.3}, {1, 0});
    REQUIRE(s);
    CHECK(std::abs(s->alpha - 0.5) <= 1e-12);
    CHECK(std::abs(s->A - (-0.1)) <= 1e-12);
  }
  {
    const auto s = solve_sliding({-1, 0}, {-1, 0}, {1, 0});
    REQUIRE(s);
    CHECK(s->degenerate);
    CHECK(s->alpha == 0.5);
    CHECK(s->A == -1.0);
  }
  {
    // both collinear with v but different: larger A reported
    const auto s = solve_sliding({2, 0}, {-1, 0}, {1, 0});
    REQUIRE(s);
    CHECK(s->degenerate);
    CHECK(s->alpha == 1.0);
    CHECK(s->A == 2.0);
  }
  // both drifts on the same side of the ray: no convex combination lands on it
  CHECK_FALSE(solve_sliding({0.5, 0.2}, {0.1, 0.3}, {1, 0}));
  // parallel to each other but not to v
  CHECK_FALSE(solve_sliding({0, 1}, {0, 1}, {1, 0}));
}

TEST_CASE("sliding residual bound on random draws") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  int solved = 0;
  for (int t = 0; t < 2000; ++t) {
    const Vec a{g(rng), g(rng)}, b{g(rng), g(rng)};
    const double th = std::uniform_real_distribution<double>(0, M_PI / 2)(rng);
    const Vec v{std::cos(th), std::sin(th)};
    if (const auto s = solve_sliding(a, b, v)) {
      ++solved;
      CHECK(s->alpha >= -1e-12);
      CHECK(s->alpha <= 1.0 + 1e-12);
      const Vec r = s->alpha * a + (1.0 - s->alpha) * b - s->A * v;
      CHECK(norm(r) <= 1e-12 * (1.0 + norm(a) + norm(b)));
    }
  }
  CHECK(solved > 100);
}

TEST_CASE("face directions stay inside their open face") {
  const auto f2 = face_directions(2, 0b11, 181);
  CHECK(f2.size() == 181);
  for (const auto& v : f2) {
    CHECK(v[0] > 0.0);
    CHECK(v[1] > 0.0);
    CHECK(norm(v) == doctest::Approx(1.0));
  }
  const auto axis = face_directions(3, 0b010, 181);
  REQUIRE(axis.size() == 1);
  CHECK(axis[0] == Vec{0, 1, 0});
  const auto f3 = face_directions(3, 0b111, 20);
  CHECK_FALSE(f3.empty());
  for (const auto& v : f3)
    for (double c : v) CHECK(c > 0.0);
  const auto f13 = face_directions(3, 0b101, 10);
  for (const auto& v : f13) {
    CHECK(v[1] == 0.0);
    CHECK(v[0] > 0.0);
    CHECK(v[2] > 0.0);
  }
}

TEST_CASE("A1 on coupled2 faces") {
  {
    const Model m = coupled2_at({0.3, 0.3});
    const auto& sp = std::get<SupportPatternDrift>(m);
    const auto f = a1_holds(sp, 0b11, 181);
    CHECK(f.holds);
    CHECK(f.directions == 181);
    // eta = (1,1) works at the diagonal: every drift has <eta, .> <= -0.4
    const Vec eta{1, 1};
    for (Pattern p = 1; p < 4; ++p) CHECK(dot(eta, sp.drift(p)) <= -0.4 + 1e-15);
    const auto all = a1_all_faces(sp);
    CHECK(all.holds);
    CHECK(all.faces.size() == 3);
  }
  {
    const Model m = coupled2_at({0.5, 0.9});
    const auto& sp = std::get<SupportPatternDrift>(m);
    const auto f = a1_holds(sp, 0b10, 181);
    CHECK_FALSE(f.holds);
    REQUIRE(f.failing_direction);
    CHECK(*f.failing_direction == Vec{0, 1});
    CHECK_FALSE(a1_all_faces(sp).holds);
  }
}

TEST_CASE("a single drift with a negative component is separable from interior directions") {
  using E = SupportPatternDrift::Entry;
  const Vec b{0.2, 0.2}, d{0.5, 0.1};
  const SupportPatternDrift sp(2, {E{1, b, d}, E{2, b, d}, E{3, b, d}});
  CHECK(a1_holds(sp, 0b11, 181).holds);
}

TEST_CASE("an interior drift pointing into the open face defeats A1") {
  // delta^{12} = (0.03, 0.3) is a single ray; no sampled direction lies on it
  const Model m = coupled2_at({0.63, 0.9});
  const auto& sp = std::get<SupportPatternDrift>(m);
  const auto f = a1_holds(sp, 0b11, 181);
  CHECK_FALSE(f.holds);
  REQUIRE(f.failing_direction);
  const Vec want = normalized(Vec{0.03, 0.3});
  CHECK(norm(*f.failing_direction - want) <= 1e-9);
}

TEST_CASE("a zero drift on a face defeats A1") {
  using E = SupportPatternDrift::Entry;
  const SupportPatternDrift sp(2, {E{1, {0.2, 0.2}, {1, 1}}, E{2, {0.2, 0.2}, {1, 1}}, E{3, {0.5, 0.5}, {0.5, 0.5}}});
  CHECK_FALSE(a1_holds(sp, 0b11, 11).holds);
}

TEST_CASE("Farkas alternative on random instances") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  std::size_t tube = 0;
  for (int t = 0; t < 2000; ++t) {
    const std::size_t d = 2 + t % 2;
    const std::size_t k = 1 + static_cast<std::size_t>(t % 6);
    std::vector<Vec> D(k, Vec(d));
    for (auto& v : D)
      for (auto& c : v) c = g(rng);
    Vec x(d);
    for (auto& c : x) c = g(rng);
    const auto s = farkas_separator(D, x);
    const auto c = in_cone(D, x);
    // near the cone boundary both certificates degenerate together
    if (s.margin <= 1e-9 && c.residual <= 1e-9 * norm(x) * 1e3 && !c.inside) {
      ++tube;
      continue;
    }
    CHECK(s.feasible != c.inside);
  }
  CHECK(tube < 5);
}

}
