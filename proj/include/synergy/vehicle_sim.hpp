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
 * @file vehicle_sim.hpp
 * @brief Kinematic ego vehicle, actuation delay, the per-frame pipeline
 *        (perception -> fault handlers -> planner -> arbitration -> step)
 *        and outcome classification for the approach-a-stationary-obstacle
 *        scenario.
 */

#ifndef SYNERGY__VEHICLE_SIM_HPP_
#define SYNERGY__VEHICLE_SIM_HPP_

#include "synergy/control.hpp"
#include "synergy/envelope.hpp"
#include "synergy/guardian.hpp"
#include "synergy/lidar_sim.hpp"
#include "synergy/mission_agent.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace synergy::sim
{

/// Commands issued at time t become active for the first step starting at or
/// after t + latency. Until then the previously active command holds.
class ActuationDelay
{
public:
  explicit ActuationDelay(double latency, ControlCommand initial = {});

  void push(double issue_time, const ControlCommand & cmd);
  /// Command in force for a step beginning at @p t. Drops superseded entries.
  const ControlCommand & active(double t);
  double latency() const { return latency_; }

private:
  double latency_;
  ControlCommand current_;
  std::deque<std::pair<double, ControlCommand>> pending_;
};

struct DynamicsParams
{
  double max_decel{7.5};   ///< [m/s^2] physical braking limit
  double max_accel{3.0};   ///< [m/s^2]
  double lateral_rate{3.5 / 3.0};  ///< [m/s] during lane changes
};

/// Queues @p cmd (issued at @p t), then advances one semi-implicit Euler step
/// of length @p dt using the command active at @p t. @p accel_jitter is added
/// to the commanded acceleration before the physical limits are applied.
VehicleState step(
  const VehicleState & state, const ControlCommand & cmd, double t, double dt,
  ActuationDelay & delay, const DynamicsParams & dynamics, const RoadSpec & road,
  double accel_jitter = 0.0);

enum class AgentMode { mission_only, sr, sr_fault_injected, sr_mission_crash };
enum class Outcome { collision, safe_stop, safe_pass };

const char * to_string(AgentMode mode);
const char * to_string(Outcome outcome);
std::optional<AgentMode> parse_mode(const std::string & text);
std::optional<Outcome> parse_outcome(const std::string & text);

struct NoiseSpec
{
  std::uint64_t seed{0};
  double accel_sigma{0.0};  ///< [m/s^2] per-frame Gaussian jitter
};

struct ScenarioConfig
{
  double v0{10.0};   ///< [m/s]
  double d0{50.0};   ///< [m] ego front bumper to obstacle rear
  AgentMode mode{AgentMode::sr};
  double dt{0.01};   ///< [s]
  double t_max{60.0};  ///< [s]

  std::string lidar_preset{"default"};
  envelope::LidarSpec lidar{lidar::default_lidar()};
  envelope::DetectabilityModel model{envelope::kDefaultDetectability};
  envelope::WeatherCondition weather{envelope::clear_weather()};
  envelope::SafetyPolicy policy{};
  RoadSpec road{};

  /// Obstacle geometry; placed in the ego's starting lane, shifted by lateral_offset.
  lidar::ObstacleTruth obstacle{1, 0.0, 0.0, 0.75, 1.9, 4.8, 0.0};
  double ego_length{4.9};
  double ego_width{1.9};

  std::optional<NoiseSpec> noise;
  guardian::GuardianParams guardian{};
  lidar::SafetySensorParams safety_sensors{};
  mission::PlannerParams planner{};
  bool hint_recovery{false};
  double clear_margin{5.0};      ///< [m] obstacle front to ego rear for a pass
  double stop_hold{1.0};         ///< [s] standstill duration that ends a run
  int trajectory_stride{1};      ///< record every n-th frame (the last is always kept)
};

/// Throws InvalidInput on any invariant violation.
void validate(const ScenarioConfig & config);

struct TrajectorySample
{
  double t{0.0};
  VehicleState ego;
  double obstacle_rear{0.0};     ///< [m] world longitudinal
  double obstacle_front{0.0};
  double obstacle_lateral{0.0};  ///< [m] world, center
  double gap{0.0};               ///< signed footprint separation, <= 0 on contact
  guardian::Action action{guardian::Action::passthrough};
};

struct Trajectory
{
  std::vector<TrajectorySample> samples;
  bool terminated{false};
};

struct RunRecord
{
  Outcome outcome{Outcome::safe_stop};
  double collision_speed{0.0};  ///< [m/s] closing speed at first contact
  double min_gap{0.0};
  double final_time{0.0};
  Trajectory trajectory;
  std::vector<guardian::FaultEvent> fault_log;  ///< fault onsets and criticality transitions
};

/// Signed separation of two axis-aligned footprints: the larger of the
/// longitudinal and lateral separations (negative means overlap on that axis).
double footprint_gap(
  const VehicleState & ego, double obstacle_rear, double obstacle_front, double obstacle_lateral,
  double obstacle_width);

RunRecord run_scenario(const ScenarioConfig & config);

/// collision iff any sample has gap <= 0; safe_pass iff the final sample has
/// the ego rear at least clear_margin past the obstacle front; otherwise
/// safe_stop. Throws InvalidInput for a trajectory that did not terminate.
Outcome classify_outcome(const Trajectory & trajectory, const ScenarioConfig & config);

}  // namespace synergy::sim

#endif  // SYNERGY__VEHICLE_SIM_HPP_
