#include <gtest/gtest.h>

#include "inspecsim/scenario.hpp"

using namespace inspecsim;

namespace {

std::string source_path(const std::string& rel) { return std::string(INSPECSIM_SOURCE_DIR) + "/" + rel; }

json inline_world() {
  return json::parse(R"({
    "bounds": {"min": [-1.8, -1.8, 0], "max": [1.8, 1.8, 2]},
    "target": [{"min": [-0.3, -0.3, 0], "max": [0.3, 0.3, 0.6]}],
    "safety_margin": 0.2})");
}

/// Straight horizontal line well clear of the target.
json line_scenario() {
  json wps = json::array();
  for (int i = 0; i <= 20; ++i) wps.push_back({{"x", -1.0 + 0.1 * i}, {"y", -1.0}, {"z", 0.8}, {"yaw", 0.0}});
  return json{{"name", "line"},
              {"world", inline_world()},
              {"path", {{"waypoints", wps}}},
              {"waypoint_spacing", 0.05},
              {"seed", 3}};
}

}  // namespace

TEST(Scenario, BundledSpiralCompletes) {
  const Scenario sc = Scenario::load(source_path("scenarios/demo_spiral.json"));
  EXPECT_EQ(sc.name, "demo_spiral");
  const HeadlessResult r = run_headless(sc);
  ASSERT_TRUE(r.report.has_value());
  EXPECT_TRUE(r.mission_complete);
  EXPECT_TRUE(r.report->mission_complete);
  EXPECT_EQ(r.final_mode, MissionMode::Idle);
  EXPECT_EQ(r.report->waypoints_visited, r.report->total_waypoints);
  EXPECT_GT(r.report->mae_z, r.report->mae_xy);
  EXPECT_LE(r.report->mae_z, 0.2);
}

TEST(Scenario, InfeasibleStandoffRejected) {
  try {
    Scenario::load(source_path("scenarios/infeasible_standoff.json"));
    FAIL() << "expected InfeasibleStandoff";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleStandoff);
    EXPECT_EQ(exit_code(e.code()), 3);
  }
}

TEST(Scenario, RunsAreByteIdentical) {
  const Scenario sc = Scenario::load(source_path("scenarios/demo_sampling.json"));
  const HeadlessResult a = run_headless(sc), b = run_headless(sc);
  EXPECT_EQ(a.log.to_ndjson(), b.log.to_ndjson());
  ASSERT_TRUE(a.report && b.report);
  EXPECT_EQ(a.report->dump(), b.report->dump());
}

TEST(Scenario, SeedChangesNoiseNotPath) {
  const Scenario base = Scenario::from_json(line_scenario());
  const Scenario other = base.with_seed(99);
  EXPECT_EQ(other.config.path.waypoints, base.config.path.waypoints);
  EXPECT_NE(other.config.noise.seed, base.config.noise.seed);
  EXPECT_NE(other.config.disturbance.seed, base.config.disturbance.seed);
  EXPECT_NE(other.config.noise.seed, other.config.disturbance.seed);
  EXPECT_EQ(base.with_seed(3).config.noise.seed, base.config.noise.seed);
}

TEST(Scenario, GravityBiasMakesZWorstOnStraightLine) {
  const HeadlessResult r = run_headless(Scenario::from_json(line_scenario()));
  ASSERT_TRUE(r.report.has_value());
  EXPECT_TRUE(r.mission_complete);
  EXPECT_GT(r.report->mae_z, r.report->mae_xy);
}

TEST(Scenario, NoDisturbanceNoBiasOrdering) {
  json j = line_scenario();
  j["disturbance"] = {{"gain", 0.0}};
  const HeadlessResult r = run_headless(Scenario::from_json(j));
  ASSERT_TRUE(r.report.has_value());
  EXPECT_TRUE(r.mission_complete);
  // Without the sag the vertical channel is no longer the worst.
  EXPECT_LT(r.report->mae_z, 0.05);
}

TEST(Scenario, InlinePathIsDensified) {
  const Scenario sc = Scenario::from_json(line_scenario());
  EXPECT_EQ(sc.planned.size(), 21u);
  EXPECT_EQ(sc.config.path.size(), 41u);
  EXPECT_EQ(sc.config.path.waypoints.front(), sc.planned.waypoints.front());
}

TEST(Scenario, RejectsUnknownKeys) {
  json j = line_scenario();
  j["sped"] = 2;
  EXPECT_THROW(Scenario::from_json(j), Error);
  json k = line_scenario();
  k["mission"] = {{"dwel_required", 0.5}};
  EXPECT_THROW(Scenario::from_json(k), Error);
}

TEST(Scenario, RejectsPathThroughTarget) {
  json j = line_scenario();
  j["path"] = {{"waypoints", {{{"x", -1.0}, {"y", 0.0}, {"z", 0.3}, {"yaw", 0.0}},
                              {{"x", 1.0}, {"y", 0.0}, {"z", 0.3}, {"yaw", 0.0}}}}};
  try {
    Scenario::from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(Scenario, UnknownPlannerRejected) {
  json j = line_scenario();
  j["path"] = {{"planner", "zigzag"}};
  EXPECT_THROW(Scenario::from_json(j), Error);
}
