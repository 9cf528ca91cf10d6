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

/**
 * @file mission_agent.hpp
 * @brief Mock mission layer: perfect perception with injectable
 *        obstacle-existence faults, and a small finite-state planner
 *        (cruise, lane change, pass, return, brake).
 */

#ifndef SYNERGY__MISSION_AGENT_HPP_
#define SYNERGY__MISSION_AGENT_HPP_

#include "synergy/control.hpp"
#include "synergy/envelope.hpp"
#include "synergy/lidar_sim.hpp"

#include <span>
#include <vector>

namespace synergy::mission
{

using lidar::BoundingSpan;
using lidar::Detection;
using lidar::ObstacleTruth;

struct MissionFaultMode
{
  enum class Kind { none, fn_always, fn_window, crash_at };

  Kind kind{Kind::none};
  double start{0.0};  ///< [s] fn_window start, or crash time for crash_at
  double end{0.0};    ///< [s] fn_window end (exclusive)
  /// fn_window only: an obstacle covered by a safety-layer region hint from
  /// the previous frame is perceived again despite the injected fault.
  bool hint_recovery{false};

  static MissionFaultMode none() { return {}; }
  static MissionFaultMode fn_always() { return {Kind::fn_always}; }
  static MissionFaultMode fn_window(double start, double end, bool hint_recovery = false)
  {
    return {Kind::fn_window, start, end, hint_recovery};
  }
  static MissionFaultMode crash_at(double t) { return {Kind::crash_at, t}; }
};

void validate(const MissionFaultMode & mode);

struct Perception
{
  std::vector<Detection> detections;
  bool mission_alive{true};
};

/// Mission-layer perception for one frame. Nominal output is the exact truth
/// box of every obstacle not fully more than rear_range behind the sensor and
/// no farther than sensor_range ahead. @p hints are the previous frame's
/// safety-layer region hints.
Perception mission_perceive(
  std::span<const ObstacleTruth> truth, double sensor_range, const MissionFaultMode & mode,
  double t, std::span<const BoundingSpan> hints = {}, double rear_range = 30.0);

enum class PlannerPhase { cruise, change, pass, ret, brake };

struct PlannerState
{
  PlannerPhase phase{PlannerPhase::cruise};
  int home_lane{0};
  int target_lane{0};
};

struct MissionGoal
{
  double target_speed{10.0};  ///< [m/s]
  bool abandon{false};         ///< stop in lane (guardian-requested)
};

struct PlannerParams
{
  envelope::SafetyPolicy policy;   ///< for stopping-distance estimates
  double comfort_decel{3.0};       ///< [m/s^2]
  double cruise_accel{1.0};        ///< [m/s^2]
  double speed_gain{1.0};          ///< [1/s] cruise speed tracking
  double lane_change_duration{3.0};  ///< [s] for one lane width
  double lookahead_factor{3.0};    ///< lookahead >= factor * stopping distance
  double lateral_clearance{0.2};   ///< [m] extra lateral room before passing
  double standoff{2.0};            ///< [m] distance kept when starting a lane change
  double gap_length{30.0};         ///< [m] free length required in the target lane
  double return_margin{5.0};       ///< [m] behind the ego rear before returning
};

struct PlanResult
{
  ControlCommand command;
  PlannerState state;
};

/// One planning step. Pure function of its arguments.
PlanResult mission_plan(
  const PlannerState & state, const VehicleState & ego, std::span<const Detection> detections,
  const MissionGoal & goal, const RoadSpec & road, const PlannerParams & params = {});

const char * to_string(PlannerPhase phase);

}  // namespace synergy::mission

#endif  // SYNERGY__MISSION_AGENT_HPP_
