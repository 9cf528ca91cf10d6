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

#include "synergy/vehicle_sim.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace synergy::sim
{

using detail::require;

ActuationDelay::ActuationDelay(double latency, ControlCommand initial)
: latency_(latency), current_(initial)
{
  require(latency >= 0.0, "latency must be >= 0");
}

void ActuationDelay::push(double issue_time, const ControlCommand & cmd)
{
  pending_.emplace_back(issue_time, cmd);
}

const ControlCommand & ActuationDelay::active(double t)
{
  while (!pending_.empty() && pending_.front().first + latency_ <= t + 1e-9) {
    current_ = pending_.front().second;
    pending_.pop_front();
  }
  return current_;
}

VehicleState step(
  const VehicleState & state, const ControlCommand & cmd, double t, double dt,
  ActuationDelay & delay, const DynamicsParams & dynamics, const RoadSpec & road,
  double accel_jitter)
{
  require(dt > 0.0, "dt must be > 0");
  delay.push(t, cmd);
  const ControlCommand & active = delay.active(t);

  VehicleState next = state;
  const double accel =
    std::clamp(active.accel + accel_jitter, -dynamics.max_decel, dynamics.max_accel);
  next.velocity = std::max(0.0, state.velocity + accel * dt);
  next.position = state.position + next.velocity * dt;

  if (active.lane_change != LaneChange::none && !next.changing_lane()) {
    const int target = next.lane + (active.lane_change == LaneChange::left ? 1 : -1);
    if (road.has_lane(target)) {
      next.target_lane = target;
    }
  }
  if (next.changing_lane()) {
    const double goal = road.lane_center(next.target_lane);
    const double move = dynamics.lateral_rate * dt;
    if (std::abs(goal - next.lateral) <= move) {
      next.lateral = goal;
      next.lane = next.target_lane;
    } else {
      next.lateral += goal > next.lateral ? move : -move;
    }
  }
  return next;
}

const char * to_string(AgentMode mode)
{
  switch (mode) {
    case AgentMode::mission_only:
      return "mission_only";
    case AgentMode::sr:
      return "sr";
    case AgentMode::sr_fault_injected:
      return "sr_fault_injected";
    case AgentMode::sr_mission_crash:
      return "sr_mission_crash";
  }
  return "?";
}

const char * to_string(Outcome outcome)
{
  switch (outcome) {
    case Outcome::collision:
      return "collision";
    case Outcome::safe_stop:
      return "safe_stop";
    case Outcome::safe_pass:
      return "safe_pass";
  }
  return "?";
}

std::optional<AgentMode> parse_mode(const std::string & text)
{
  for (auto m : {AgentMode::mission_only, AgentMode::sr, AgentMode::sr_fault_injected,
                 AgentMode::sr_mission_crash}) {
    if (text == to_string(m)) {
      return m;
    }
  }
  return std::nullopt;
}

std::optional<Outcome> parse_outcome(const std::string & text)
{
  for (auto o : {Outcome::collision, Outcome::safe_stop, Outcome::safe_pass}) {
    if (text == to_string(o)) {
      return o;
    }
  }
  return std::nullopt;
}

void validate(const ScenarioConfig & config)
{
  require(config.dt > 0.0 && config.dt <= 0.1, "dt must lie in (0, 0.1]");
  require(config.v0 > 0.0, "v0 must be > 0");
  require(config.d0 > 0.0, "d0 must be > 0");
  require(config.t_max > 0.0, "t_max must be > 0");
  envelope::validate(config.lidar);
  envelope::validate(config.model);
  envelope::validate(config.weather);
  envelope::validate(config.policy);
  lidar::validate(config.obstacle);
  require(config.road.lanes >= 1, "road needs at least one lane");
  require(config.road.lane_width > 0.0, "lane width must be > 0");
  require(config.ego_length > 0.0 && config.ego_width > 0.0, "ego dimensions must be > 0");
  require(config.trajectory_stride >= 1, "trajectory stride must be >= 1");
  require(config.clear_margin >= 0.0, "clear margin must be >= 0");
  require(config.stop_hold > 0.0, "stop hold must be > 0");
  require(config.planner.comfort_decel > 0.0, "comfort deceleration must be > 0");
  require(
    config.planner.comfort_decel <= config.policy.max_decel,
    "comfort deceleration must not exceed max deceleration");
  require(config.planner.lane_change_duration > 0.0, "lane change duration must be > 0");
  if (config.noise) {
    require(config.noise->accel_sigma >= 0.0, "noise sigma must be >= 0");
  }
}

double footprint_gap(
  const VehicleState & ego, double obstacle_rear, double obstacle_front, double obstacle_lateral,
  double obstacle_width)
{
  const double sep_x = std::max(obstacle_rear - ego.position, ego.rear() - obstacle_front);
  const double sep_y = std::max(
    (obstacle_lateral - 0.5 * obstacle_width) - (ego.lateral + 0.5 * ego.width),
    (ego.lateral - 0.5 * ego.width) - (obstacle_lateral + 0.5 * obstacle_width));
  return std::max(sep_x, sep_y);
}

Outcome classify_outcome(const Trajectory & trajectory, const ScenarioConfig & config)
{
  require(
    trajectory.terminated && !trajectory.samples.empty(),
    "trajectory has not terminated");
  const bool collided = std::any_of(
    trajectory.samples.begin(), trajectory.samples.end(), [](const auto & s) { return s.gap <= 0.0; });
  if (collided) {
    return Outcome::collision;
  }
  const auto & last = trajectory.samples.back();
  if (last.ego.rear() >= last.obstacle_front + config.clear_margin) {
    return Outcome::safe_pass;
  }
  return Outcome::safe_stop;
}

namespace
{

mission::MissionFaultMode fault_mode_for(const ScenarioConfig & config)
{
  switch (config.mode) {
    case AgentMode::sr_fault_injected:
      return config.hint_recovery
               ? mission::MissionFaultMode::fn_window(0.0, config.t_max + 1.0, true)
               : mission::MissionFaultMode::fn_always();
    case AgentMode::sr_mission_crash:
      return mission::MissionFaultMode::crash_at(0.0);
    case AgentMode::mission_only:
    case AgentMode::sr:
      break;
  }
  return mission::MissionFaultMode::none();
}

}  // namespace

RunRecord run_scenario(const ScenarioConfig & config)
{
  validate(config);

  const RoadSpec & road = config.road;
  const bool guardian_on = config.mode != AgentMode::mission_only;
  const auto fault_mode = fault_mode_for(config);
  const double sensor_range = envelope::effective_lidar_range(config.lidar, config.weather);

  mission::PlannerParams planner = config.planner;
  planner.policy = config.policy;
  const DynamicsParams dynamics{
    config.policy.max_decel, 3.0, road.lane_width / planner.lane_change_duration};

  VehicleState ego;
  ego.position = 0.0;
  ego.lateral = road.lane_center(0);
  ego.velocity = config.v0;
  ego.length = config.ego_length;
  ego.width = config.ego_width;

  lidar::ObstacleTruth obstacle = config.obstacle;
  double obstacle_rear = config.d0;
  const double obstacle_lateral = road.lane_center(0) + config.obstacle.lateral_offset;

  guardian::Guardian guard(config.guardian);
  mission::PlannerState plan_state;
  ActuationDelay delay(config.policy.max_latency);
  std::vector<lidar::BoundingSpan> hints;

  std::mt19937_64 rng(config.noise ? config.noise->seed : 0);
  std::normal_distribution<double> jitter_dist(
    0.0, config.noise ? std::max(config.noise->accel_sigma, 0.0) : 0.0);
  const bool noisy = config.noise && config.noise->accel_sigma > 0.0;

  RunRecord record;
  auto sample_at = [&](double t, guardian::Action action) {
    TrajectorySample s;
    s.t = t;
    s.ego = ego;
    s.obstacle_rear = obstacle_rear;
    s.obstacle_front = obstacle_rear + obstacle.length;
    s.obstacle_lateral = obstacle_lateral;
    s.gap = footprint_gap(ego, s.obstacle_rear, s.obstacle_front, obstacle_lateral, obstacle.width);
    s.action = action;
    return s;
  };

  auto first = sample_at(0.0, guardian::Action::passthrough);
  record.min_gap = first.gap;
  record.trajectory.samples.push_back(first);

  const auto hold_frames = static_cast<long>(std::ceil(config.stop_hold / config.dt - 1e-9));
  const auto max_frames = static_cast<long>(std::ceil(config.t_max / config.dt - 1e-9));
  long standstill = 0;
  bool had_faults = false;
  bool had_critical = false;

  for (long k = 0; k < max_frames; ++k) {
    const double t = static_cast<double>(k) * config.dt;

    obstacle.center_distance = obstacle_rear + 0.5 * obstacle.length - ego.position;
    obstacle.lateral_offset = obstacle_lateral - ego.lateral;
    const std::span<const lidar::ObstacleTruth> truth(&obstacle, 1);

    const auto perception =
      mission::mission_perceive(truth, sensor_range, fault_mode, t, hints);

    guardian::GuardianDecision decision;
    if (guardian_on) {
      const auto safety =
        lidar::perceive_safety(config.lidar, truth, sensor_range, config.safety_sensors, t);
      const auto status = guardian::monitor_constraints(
        config.weather, config.lidar, config.model, config.policy, ego.velocity, config.guardian);
      auto faults =
        guardian::compare_detections(safety, perception.detections, config.guardian.match);
      const guardian::LateralInterval ego_span{-0.5 * ego.width, 0.5 * ego.width};
      for (auto & f : faults) {
        f = guardian::assess_criticality(f, ego.velocity, ego_span, config.policy, config.guardian);
      }
      decision = guard.decide_response(std::move(faults), status, perception.mission_alive, safety);
      hints = decision.region_hints;

      const bool has_critical = std::any_of(
        decision.faults.begin(), decision.faults.end(), [](auto & f) { return f.critical; });
      for (const auto & f : decision.faults) {
        if (!had_faults || (f.critical && !had_critical)) {
          record.fault_log.push_back(f);
        }
      }
      had_faults = !decision.faults.empty();
      had_critical = has_critical;
    }

    ControlCommand command;
    if (perception.mission_alive) {
      const mission::MissionGoal goal{
        config.v0, decision.action == guardian::Action::mission_abandon};
      auto plan =
        mission::mission_plan(plan_state, ego, perception.detections, goal, road, planner);
      plan_state = plan.state;
      command = plan.command;
    }
    if (guardian_on) {
      command =
        guardian::arbitrate_control(command, decision, ego.velocity, config.policy, config.dt);
    }

    const double jitter = noisy ? jitter_dist(rng) : 0.0;
    ego = step(ego, command, t, config.dt, delay, dynamics, road, jitter);
    obstacle_rear += obstacle.velocity * config.dt;

    const double t_next = static_cast<double>(k + 1) * config.dt;
    auto sample = sample_at(t_next, decision.action);
    record.min_gap = std::min(record.min_gap, sample.gap);
    standstill = ego.velocity <= 0.0 ? standstill + 1 : 0;

    const bool collided = sample.gap <= 0.0;
    const bool passed = ego.rear() >= sample.obstacle_front + config.clear_margin;
    const bool done =
      collided || passed || standstill >= hold_frames || k + 1 >= max_frames;
    if (collided) {
      record.collision_speed = std::abs(ego.velocity - obstacle.velocity);
    }
    if (done || (k + 1) % config.trajectory_stride == 0) {
      record.trajectory.samples.push_back(sample);
    }
    if (done) {
      record.final_time = t_next;
      break;
    }
  }

  record.trajectory.terminated = true;
  record.outcome = classify_outcome(record.trajectory, config);
  return record;
}

}  // namespace synergy::sim
