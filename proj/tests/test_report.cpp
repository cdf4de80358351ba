#include <doctest.h>

#include "bdstab/report.hpp"
#include "bdstab/scenario_io.hpp"

using namespace bdstab;

TEST_SUITE("report") {

TEST_CASE("combining analytic labels") {
  CHECK(combine({}) == Overall::Inconclusive);
  CHECK(combine({Label::Stable, Label::Inconclusive}) == Overall::Stable);
  CHECK(combine({Label::Unstable, Label::Boundary}) == Overall::Unstable);
  CHECK(combine({Label::Boundary, Label::Inconclusive}) == Overall::Boundary);
  CHECK(combine({Label::Stable, Label::Unstable}) == Overall::Conflict);
  CHECK(combine({Label::Stable, Label::Boundary}) == Overall::Stable);
  CHECK(to_string(Overall::Conflict) == "conflict");
}

TEST_CASE("support-pattern models run a1 and the region method") {
  const Scenario s = builtin_scenario("coupled2", {{"lambda", {0.5, 0.9}}});
  const auto rep = classify(s, false);
  REQUIRE(rep.methods.size() == 2);
  CHECK(rep.methods[0].method == "a1");
  CHECK(rep.methods[0].label == "inconclusive");
  CHECK(rep.methods[1].method == "region2d");
  CHECK(rep.overall == Overall::Unstable);
  const auto j = rep.to_json();
  CHECK(j["overall"] == "unstable");
  CHECK(j["fingerprint"] == fingerprint(s));
  const auto& w = j["methods"]["region2d"]["witness"];
  CHECK(w["kind"] == "U2");
  CHECK(w["ray"] == 3);
  CHECK(j["methods"]["a1"]["analytic"] == true);
}

TEST_CASE("stable coupled2 agrees across methods") {
  const auto rep = classify(builtin_scenario("coupled2"), false);
  CHECK(rep.methods[0].label == "stable");
  CHECK(rep.methods[1].label == "stable");
  CHECK(rep.overall == Overall::Stable);
}

TEST_CASE("cone models run the region method only") {
  const auto rep = classify(builtin_scenario("jsq2"), false);
  REQUIRE(rep.methods.size() == 1);
  CHECK(rep.methods[0].method == "region2d");
  CHECK(rep.family == "cone_partition");
  CHECK(rep.overall == Overall::Stable);
}

TEST_CASE("smooth models run the flow and gradient methods") {
  Scenario s = builtin_scenario("shannon2");
  s.analysis.flow.mesh = 45;
  const auto rep = classify(s, false);
  REQUIRE(rep.methods.size() == 2);
  CHECK(rep.methods[0].method == "ode");
  CHECK(rep.methods[1].method == "gradient");
  CHECK(rep.overall == Overall::Stable);
  const auto j = rep.to_json();
  CHECK(j["methods"]["ode"].contains("sup_hitting_time"));
  CHECK(j["settings"]["flow"]["mesh"] == 45);
}

TEST_CASE("conflicting analytic methods are reported as a conflict") {
  const Scenario s = load_scenario(std::filesystem::path(BDSTAB_TEST_DATA) / "conflict.json");
  const auto rep = classify(s, false);
  CHECK(rep.methods[0].label == "unstable");
  CHECK(rep.methods[1].label == "stable");
  CHECK(rep.overall == Overall::Conflict);
}

TEST_CASE("simulation is attached but never decides") {
  Scenario s = builtin_scenario("coupled2", {{"lambda", {1.3, 1.3}}});
  s.analysis.sim.horizon = 5e3;
  s.analysis.sim.replicas = 2;
  const auto rep = full_report(s);
  REQUIRE(rep.methods.size() == 3);
  CHECK(rep.methods[2].method == "simulation");
  CHECK_FALSE(rep.methods[2].analytic);
  CHECK(rep.methods[2].label == "empirically_unstable");
  CHECK(rep.overall == Overall::Unstable);
  const auto j = rep.to_json();
  CHECK(j["extras"]["region_polygon"]["vertices"].size() == 4);
  CHECK(j["methods"]["simulation"]["analytic"] == false);
}

}
