#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bdstab/errors.hpp"
#include "bdstab/ode_flow.hpp"
#include "fields.hpp"

using namespace bdstab;

TEST_SUITE("ode_flow") {

TEST_CASE("radial inflow reaches the inner ball at 1 - kappa") {
  const Model m = fields::radial_in();
  const FlowSettings st;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const Vec x = random_orthant_direction(2, rng);
    const auto tr = integrate(m, x, st);
    CHECK(tr.termination == Termination::HitInnerBall);
    CHECK(std::abs(tr.end_time - (1.0 - st.kappa)) <= 1e-6);
    for (std::size_t k = 1; k < tr.samples.size(); ++k) {
      CHECK(tr.samples[k].t > tr.samples[k - 1].t);
      // |u(t)| = 1 - t along the whole path
      CHECK(std::abs(norm(tr.samples[k].u) - (1.0 - tr.samples[k].t)) <= 1e-9);
    }
  }
}

TEST_CASE("hitting time is 1-homogeneous") {
  const Model m = fields::radial_in();
  const FlowSettings st;
  const auto h1 = hitting_time(m, Vec{0.6, 0.8}, st);
  const auto h2 = hitting_time(m, Vec{1.2, 1.6}, st);
  REQUIRE(h1.kind == HittingTime::Kind::Time);
  REQUIRE(h2.kind == HittingTime::Kind::Time);
  CHECK(std::abs(h1.time - 0.999) <= 1e-6);
  CHECK(std::abs(h2.time - 1.999) <= 1e-6);
  const auto h10 = hitting_time(m, Vec{6.0, 8.0}, st);
  CHECK(std::abs(h10.time - (10.0 * h1.time + 9.0 * st.kappa)) <= 1e-5);
}

TEST_CASE("hitting time is monotone in kappa") {
  const Model m = builtin_scenario("shannon2").model;
  FlowSettings a, b;
  a.kappa = 1e-2;
  b.kappa = 1e-3;
  const Vec x{0.3, 0.9};
  const auto ta = hitting_time(m, x, a);
  const auto tb = hitting_time(m, x, b);
  REQUIRE(ta.kind == HittingTime::Kind::Time);
  REQUIRE(tb.kind == HittingTime::Kind::Time);
  CHECK(tb.time >= ta.time);
}

TEST_CASE("constant outward drift escapes in a straight line") {
  const double c = 1.0 / std::sqrt(2.0);
  const Model m = fields::constant({c, c}, {0.0, 0.0});
  const FlowSettings st;
  const auto tr = integrate(m, Vec{1.0, 0.0}, st);
  CHECK(tr.termination == Termination::ExceededRadius);
  // |(1,0) + t (1,1)/sqrt2| = 1000
  const double t = (-std::sqrt(2.0) + std::sqrt(2.0 - 4.0 * (1.0 - 1e6))) / 2.0;
  CHECK(std::abs(tr.end_time - t) <= 1e-6);
  CHECK(std::abs(norm(tr.end_state) - 1000.0) <= 1e-6);
  const auto h = hitting_time(m, Vec{1.0, 0.0}, st);
  CHECK(h.kind == HittingTime::Kind::Divergent);
}

TEST_CASE("leaving the orthant ends the trajectory") {
  const Model m = fields::constant({0.0, 0.5}, {1.0, 0.0});
  const auto tr = integrate(m, Vec{1.0, 1.0}, FlowSettings{});
  CHECK(tr.termination == Termination::ExitedOrthant);
  CHECK(tr.exit_coordinate == 0);
  CHECK(std::abs(tr.end_time - 1.0) <= 1e-9);
  CHECK(hitting_time(m, Vec{1.0, 1.0}, FlowSettings{}).kind == HittingTime::Kind::Undetermined);
}

TEST_CASE("time budget yields Timeout") {
  FlowSettings st;
  st.t_max = 0.5;
  const auto tr = integrate(fields::radial_in(), Vec{1.0, 0.0}, st);
  CHECK(tr.termination == Termination::Timeout);
  CHECK(tr.end_time == 0.5);
  CHECK(std::abs(norm(tr.end_state) - 0.5) <= 1e-10);
}

TEST_CASE("shannon2 from the e2 axis terminates with a recorded event") {
  const Scenario s = builtin_scenario("shannon2", {{"lambda", {0.4, 0.8}}, {"noise", {0.1}}});
  const auto tr = integrate(s.model, Vec{0.0, 1.0}, s.analysis.flow);
  CHECK(tr.end_time > 0.0);
  CHECK(tr.samples.size() >= 2);
  for (const auto& smp : tr.samples)
    for (double v : smp.u) CHECK(std::isfinite(v));
}

TEST_CASE("classify_smooth on radial fields") {
  const FlowSettings st;
  const auto in = classify_smooth(fields::radial_in(), st);
  CHECK(in.label == Label::Stable);
  CHECK(in.directions == 720);
  CHECK(in.hit == 720);
  CHECK(std::abs(in.sup_hitting_time - (1.0 - st.kappa)) <= 1e-5);

  const auto out = classify_smooth(fields::radial_out(), st);
  CHECK(out.label == Label::Unstable);
  CHECK(out.expansion_factor >= st.unstable_margin);
  // |u(T)| = 1 + T
  CHECK(std::abs(out.expansion_factor - (1.0 + out.expansion_time)) <= 1e-6);
}

TEST_CASE("mixed outcomes are inconclusive") {
  // outward along e1, inward along e2, and the flow leaves through the x2 = 0 face elsewhere
  const Model m = fields::constant({0.5, 0.0}, {0.0, 1.0});
  const auto v = classify_smooth(m, FlowSettings{});
  CHECK(v.label == Label::Inconclusive);
  CHECK(v.hit + v.exceeded + v.exited + v.timeout == v.directions);
}

TEST_CASE("refining the mesh does not flip the verdict") {
  FlowSettings coarse, fine;
  coarse.mesh = 90;
  fine.mesh = 180;
  for (const Model& m : {fields::radial_in(), fields::radial_out()}) {
    CHECK(classify_smooth(m, coarse).label == classify_smooth(m, fine).label);
  }
}

TEST_CASE("scaling identity") {
  const auto ok = scaling_check(fields::radial_in(), FlowSettings{});
  CHECK(ok.passed);
  CHECK(ok.max_deviation <= 1e-8);
  REQUIRE(ok.factors == std::vector<double>{2.0, 10.0});

  const auto shannon = builtin_scenario("shannon2");
  CHECK(scaling_check(shannon.model, shannon.analysis.flow).passed);

  const auto bad = scaling_check(fields::linear_in(), FlowSettings{});
  CHECK_FALSE(bad.passed);
}

TEST_CASE("3D radial field on the icosphere mesh") {
  FlowSettings st;
  st.icosphere_level = 2;
  const auto v = classify_smooth(fields::radial_in(3), st);
  CHECK(v.label == Label::Stable);
  CHECK(std::abs(v.sup_hitting_time - (1.0 - st.kappa)) <= 1e-5);
}

TEST_CASE("piecewise-constant models are refused") {
  const Scenario s = builtin_scenario("coupled2");
  CHECK_THROWS_AS(integrate(s.model, Vec{1.0, 1.0}, FlowSettings{}), ContractError);
  CHECK_THROWS_AS(classify_smooth(s.model, FlowSettings{}), ContractError);
  FlowSettings bad;
  bad.kappa = 2.0;
  CHECK_THROWS_AS(integrate(fields::radial_in(), Vec{1.0, 0.0}, bad), ContractError);
  CHECK_THROWS_AS(integrate(fields::radial_in(), Vec{0.0, 0.0}, FlowSettings{}), DomainError);
}

TEST_CASE("trajectory CSV") {
  FlowSettings st;
  st.t_max = 0.1;
  const auto tr = integrate(fields::radial_in(), Vec{0.6, 0.8}, st);
  std::ostringstream out;
  write_trajectory_csv(out, tr);
  const std::string csv = out.str();
  CHECK(csv.rfind("t,u1,u2,norm\r\n", 0) == 0);
  CHECK(csv.find("\r\n0,0.59999999999999998,0.80000000000000004,") != std::string::npos);
}

}
