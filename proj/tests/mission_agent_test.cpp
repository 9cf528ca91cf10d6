// Copyright 2026 The Synergy Sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synergy/error.hpp"
#include "synergy/mission_agent.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace synergy;
using namespace synergy::mission;

namespace
{

ObstacleTruth car(double near, double lateral = 0.0)
{
  return ObstacleTruth{3, near + 2.4, lateral, 0.75, 1.9, 4.8, 0.0};
}

VehicleState ego_at(double v, int lane = 0)
{
  VehicleState s;
  s.velocity = v;
  s.lane = lane;
  s.target_lane = lane;
  s.lateral = lane * 3.5;
  return s;
}

Detection seen(double near, double lateral = 0.0)
{
  const auto o = car(near, lateral);
  Detection d;
  d.source = lidar::DetectionSource::mission;
  d.span = {o.near_face(), o.far_face(), o.lateral_min(), o.lateral_max(), o.height};
  return d;
}

}  // namespace

TEST(MissionPerceive, NominalIsTruth)
{
  const std::vector<ObstacleTruth> truth{car(30.0, 0.5)};
  const auto p = mission_perceive(truth, 100.0, MissionFaultMode::none(), 1.25);
  EXPECT_TRUE(p.mission_alive);
  ASSERT_EQ(p.detections.size(), 1u);
  const auto & d = p.detections[0];
  EXPECT_EQ(d.source, lidar::DetectionSource::mission);
  EXPECT_EQ(d.obstacle_id, 3);
  EXPECT_DOUBLE_EQ(d.span.near, 30.0);
  EXPECT_DOUBLE_EQ(d.span.far, 34.8);
  EXPECT_DOUBLE_EQ(d.span.lateral_min, 0.5 - 0.95);
  EXPECT_DOUBLE_EQ(d.span.lateral_max, 0.5 + 0.95);
  EXPECT_DOUBLE_EQ(d.stamp, 1.25);
}

TEST(MissionPerceive, OutOfSensorRangeIsUnseen)
{
  const std::vector<ObstacleTruth> truth{car(30.0)};
  EXPECT_TRUE(mission_perceive(truth, 20.0, MissionFaultMode::none(), 0.0).detections.empty());
}

TEST(MissionPerceive, PersistentFalseNegative)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> near(-20.0, 90.0);
  std::uniform_real_distribution<double> lat(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const std::vector<ObstacleTruth> truth{car(near(rng), lat(rng)), car(near(rng), lat(rng))};
    const auto p = mission_perceive(truth, 100.0, MissionFaultMode::fn_always(), i * 0.1);
    EXPECT_TRUE(p.detections.empty());
    EXPECT_TRUE(p.mission_alive);
  }
}

TEST(MissionPerceive, CrashAtTimeZero)
{
  const std::vector<ObstacleTruth> truth{car(30.0)};
  EXPECT_FALSE(mission_perceive(truth, 100.0, MissionFaultMode::crash_at(0.0), 0.0).mission_alive);
  EXPECT_TRUE(mission_perceive(truth, 100.0, MissionFaultMode::crash_at(2.0), 1.99).mission_alive);
  EXPECT_FALSE(mission_perceive(truth, 100.0, MissionFaultMode::crash_at(2.0), 2.0).mission_alive);
}

TEST(MissionPerceive, WindowAndHintRecovery)
{
  const std::vector<ObstacleTruth> truth{car(20.0)};
  const auto window = MissionFaultMode::fn_window(1.0, 2.0);
  EXPECT_EQ(mission_perceive(truth, 100.0, window, 0.5).detections.size(), 1u);
  EXPECT_TRUE(mission_perceive(truth, 100.0, window, 1.5).detections.empty());
  EXPECT_EQ(mission_perceive(truth, 100.0, window, 2.0).detections.size(), 1u);

  const std::vector<lidar::BoundingSpan> hint{{20.0, 20.3, -0.9, 0.9, 0.75}};
  EXPECT_TRUE(mission_perceive(truth, 100.0, window, 1.5, hint).detections.empty());
  const auto recovering = MissionFaultMode::fn_window(1.0, 2.0, true);
  EXPECT_EQ(mission_perceive(truth, 100.0, recovering, 1.5, hint).detections.size(), 1u);
  const std::vector<lidar::BoundingSpan> elsewhere{{50.0, 51.0, 5.0, 6.0, 0.75}};
  EXPECT_TRUE(mission_perceive(truth, 100.0, recovering, 1.5, elsewhere).detections.empty());
}

TEST(MissionPerceive, RejectsBadModes)
{
  const std::vector<ObstacleTruth> truth{car(20.0)};
  EXPECT_THROW(mission_perceive(truth, 100.0, MissionFaultMode::fn_window(2.0, 1.0), 0.0), InvalidInput);
  EXPECT_THROW(mission_perceive(truth, 100.0, MissionFaultMode::crash_at(-1.0), 0.0), InvalidInput);
  EXPECT_THROW(mission_perceive(truth, 100.0, MissionFaultMode::none(), -0.1), InvalidInput);
}

TEST(MissionPlan, CruiseAcceleratesTowardTarget)
{
  const auto r = mission_plan({}, ego_at(8.0), {}, MissionGoal{10.0, false}, RoadSpec{});
  EXPECT_GT(r.command.accel, 0.0);
  EXPECT_EQ(r.command.lane_change, LaneChange::none);
  EXPECT_EQ(r.state.phase, PlannerPhase::cruise);
}

TEST(MissionPlan, ChangesLaneAroundBlockingObstacle)
{
  // At 20 m/s three stopping distances are about 81 m, so 60 m is inside the lookahead.
  const std::vector<Detection> ahead{seen(60.0)};
  const auto r = mission_plan({}, ego_at(20.0), ahead, MissionGoal{20.0, false}, RoadSpec{});
  EXPECT_EQ(r.command.lane_change, LaneChange::left);
  EXPECT_EQ(r.state.phase, PlannerPhase::change);
  EXPECT_EQ(r.state.target_lane, 1);
  EXPECT_EQ(r.state.home_lane, 0);
}

TEST(MissionPlan, IgnoresObstacleInOtherLane)
{
  const std::vector<Detection> beside{seen(15.0, 3.5)};
  const auto r = mission_plan({}, ego_at(15.0), beside, MissionGoal{15.0, false}, RoadSpec{});
  EXPECT_EQ(r.command.lane_change, LaneChange::none);
  EXPECT_EQ(r.state.phase, PlannerPhase::cruise);
}

TEST(MissionPlan, BrakesWhenNoLaneIsAvailable)
{
  const RoadSpec one_lane{1, 3.5};
  const std::vector<Detection> close{seen(8.0)};
  // 15 m/s needs 15.19 m at full braking: more than the 8 m available.
  const auto hard = mission_plan({}, ego_at(15.0), close, MissionGoal{15.0, false}, one_lane);
  EXPECT_EQ(hard.state.phase, PlannerPhase::brake);
  EXPECT_DOUBLE_EQ(hard.command.accel, -7.5);
  // 5 m/s stops within 4.3 m at comfort deceleration.
  const auto soft = mission_plan({}, ego_at(5.0), close, MissionGoal{5.0, false}, one_lane);
  EXPECT_EQ(soft.state.phase, PlannerPhase::brake);
  EXPECT_DOUBLE_EQ(soft.command.accel, -3.0);
}

TEST(MissionPlan, AbandonBrakesInLane)
{
  const auto r = mission_plan({}, ego_at(10.0), {}, MissionGoal{10.0, true}, RoadSpec{});
  EXPECT_LT(r.command.accel, 0.0);
  EXPECT_EQ(r.command.lane_change, LaneChange::none);
  EXPECT_EQ(r.state.phase, PlannerPhase::brake);
}

TEST(MissionPlan, ReturnsHomeAfterPassing)
{
  PlannerState passing{PlannerPhase::pass, 0, 1};
  auto ego = ego_at(15.0, 1);
  // The obstacle is now behind the ego rear by more than the return margin.
  const std::vector<Detection> behind{seen(-15.0, -3.5)};
  const auto r = mission_plan(passing, ego, behind, MissionGoal{15.0, false}, RoadSpec{});
  EXPECT_EQ(r.state.phase, PlannerPhase::ret);
  EXPECT_EQ(r.command.lane_change, LaneChange::right);
}

TEST(MissionPlan, PureFunctionOfInputs)
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> near(-10.0, 100.0);
  std::uniform_real_distribution<double> speed(0.0, 40.0);
  for (int i = 0; i < 500; ++i) {
    const std::vector<Detection> ds{seen(near(rng)), seen(near(rng), 3.5)};
    const auto ego = ego_at(speed(rng));
    const PlannerState st{static_cast<PlannerPhase>(rng() % 5), 0, static_cast<int>(rng() % 2)};
    const auto a = mission_plan(st, ego, ds, MissionGoal{20.0, false}, RoadSpec{});
    const auto b = mission_plan(st, ego, ds, MissionGoal{20.0, false}, RoadSpec{});
    EXPECT_EQ(a.command, b.command);
    EXPECT_EQ(a.state.phase, b.state.phase);
  }
}
