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

#include "synergy/guardian.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>

namespace synergy::guardian
{

namespace
{

constexpr double kSpeedTolerance = 1e-9;

double axis_fraction(double lo, double hi, double cover_lo, double cover_hi)
{
  const double len = hi - lo;
  if (len <= 1e-9) {
    const double mid = 0.5 * (lo + hi);
    return (mid >= cover_lo && mid <= cover_hi) ? 1.0 : 0.0;
  }
  const double overlap = std::min(hi, cover_hi) - std::max(lo, cover_lo);
  return std::clamp(overlap / len, 0.0, 1.0);
}

bool contains_center(const BoundingSpan & cover, const BoundingSpan & span)
{
  const double cx = span.center_x();
  const double cy = span.center_y();
  return cx >= cover.near && cx <= cover.far && cy >= cover.lateral_min &&
         cy <= cover.lateral_max;
}

}  // namespace

ConstraintStatus monitor_constraints(
  const envelope::WeatherCondition & weather, const envelope::LidarSpec & lidar,
  const envelope::DetectabilityModel & model, const envelope::SafetyPolicy & policy,
  double ego_velocity, const GuardianParams & params)
{
  ConstraintStatus status;
  status.velocity_cap = envelope::weather_adjusted_safe_velocity(policy, model, lidar, weather);
  status.lidar_valid = envelope::effective_lidar_range(lidar, weather) >
                       lidar.near_blind_range + policy.safety_margin;
  status.mission_abandon_requested =
    status.velocity_cap < params.v_min_operational && !status.lidar_valid;
  status.over_cap = ego_velocity > status.velocity_cap + kSpeedTolerance;
  return status;
}

double overlap_fraction(const BoundingSpan & span, const BoundingSpan & cover)
{
  return axis_fraction(span.near, span.far, cover.near, cover.far) *
         axis_fraction(span.lateral_min, span.lateral_max, cover.lateral_min, cover.lateral_max);
}

std::vector<FaultEvent> compare_detections(
  std::span<const Detection> safety, std::span<const Detection> mission, const MatchPolicy & match)
{
  const Detection * first = !safety.empty() ? &safety.front()
                          : !mission.empty() ? &mission.front()
                                             : nullptr;
  if (first != nullptr) {
    auto same_frame = [&](const Detection & d) { return d.stamp == first->stamp; };
    detail::require(
      std::all_of(safety.begin(), safety.end(), same_frame) &&
        std::all_of(mission.begin(), mission.end(), same_frame),
      "detections from different frames cannot be compared");
  }

  std::vector<FaultEvent> faults;
  for (const auto & s : safety) {
    const bool covered = std::any_of(mission.begin(), mission.end(), [&](const Detection & m) {
      if (match.require_center && !contains_center(m.span, s.span)) {
        return false;
      }
      return overlap_fraction(s.span, m.span) >= match.min_overlap;
    });
    if (!covered) {
      FaultEvent fault;
      fault.detection = s;
      fault.timestamp = s.stamp;
      faults.push_back(fault);
    }
  }
  return faults;
}

FaultEvent assess_criticality(
  FaultEvent fault, double ego_velocity, const LateralInterval & ego_lane_span,
  const envelope::SafetyPolicy & policy, const GuardianParams & params)
{
  const BoundingSpan & span = fault.detection.span;
  fault.in_path = span.lateral_min <= ego_lane_span.max + params.lateral_margin &&
                  span.lateral_max >= ego_lane_span.min - params.lateral_margin;
  const double reach =
    envelope::stopping_distance(std::max(0.0, ego_velocity), policy) + params.risk_margin;
  fault.critical = fault.in_path && span.near <= reach;
  return fault;
}

GuardianDecision Guardian::decide_response(
  std::vector<FaultEvent> faults, const ConstraintStatus & status, bool mission_alive,
  std::span<const Detection> safety_detections)
{
  GuardianDecision decision;
  decision.cap = status.velocity_cap;
  for (const auto & d : safety_detections) {
    decision.region_hints.push_back(d.span);
  }

  bool critical = std::any_of(faults.begin(), faults.end(), [](auto & f) { return f.critical; });
  if (!critical && latched_) {
    // The override stays on while the hazard that triggered it is still unresolved.
    for (auto & f : faults) {
      if (f.in_path) {
        f.critical = true;
        critical = true;
      }
    }
  }
  latched_ = critical;
  decision.faults = std::move(faults);

  if (critical || !mission_alive) {
    decision.action = Action::emergency_brake;
  } else if (status.mission_abandon_requested) {
    decision.action = Action::mission_abandon;
  } else if (status.over_cap) {
    decision.action = Action::velocity_limit;
  } else {
    decision.action = Action::passthrough;
  }
  return decision;
}

ControlCommand arbitrate_control(
  const ControlCommand & mission_cmd, const GuardianDecision & decision, double ego_velocity,
  const envelope::SafetyPolicy & policy, double dt)
{
  detail::require(dt > 0.0, "control period must be > 0");
  switch (decision.action) {
    case Action::emergency_brake:
      return ControlCommand{-policy.max_decel, LaneChange::none, CommandSource::guardian, false};
    case Action::mission_abandon: {
      ControlCommand cmd = mission_cmd;
      cmd.abandon_mission = true;
      return cmd;
    }
    case Action::velocity_limit: {
      const double bound = std::max(-policy.max_decel, (decision.cap - ego_velocity) / dt);
      if (mission_cmd.accel <= bound) {
        return mission_cmd;
      }
      ControlCommand cmd = mission_cmd;
      cmd.accel = bound;
      cmd.source = CommandSource::guardian;
      return cmd;
    }
    case Action::passthrough:
      break;
  }
  return mission_cmd;
}

const char * to_string(Action action)
{
  switch (action) {
    case Action::passthrough:
      return "passthrough";
    case Action::velocity_limit:
      return "velocity_limit";
    case Action::emergency_brake:
      return "emergency_brake";
    case Action::mission_abandon:
      return "mission_abandon";
  }
  return "?";
}

}  // namespace synergy::guardian
