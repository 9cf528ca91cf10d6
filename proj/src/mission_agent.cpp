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

#include "synergy/mission_agent.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace synergy::mission
{

using detail::require;

void validate(const MissionFaultMode & mode)
{
  if (mode.kind == MissionFaultMode::Kind::fn_window) {
    require(mode.start < mode.end, "fault window start must precede its end");
  }
  if (mode.kind == MissionFaultMode::Kind::crash_at) {
    require(mode.start >= 0.0, "crash time must be >= 0");
  }
}

namespace
{

constexpr double kHintTolerance = 0.5;  // [m] ego motion between frames

bool hint_covers(const BoundingSpan & hint, const ObstacleTruth & o)
{
  return hint.near - kHintTolerance <= o.far_face() && o.near_face() <= hint.far + kHintTolerance &&
         hint.lateral_min - kHintTolerance <= o.lateral_max() &&
         o.lateral_min() <= hint.lateral_max + kHintTolerance;
}

}  // namespace

Perception mission_perceive(
  std::span<const ObstacleTruth> truth, double sensor_range, const MissionFaultMode & mode,
  double t, std::span<const BoundingSpan> hints, double rear_range)
{
  require(t >= 0.0, "time must be >= 0");
  validate(mode);

  Perception out;
  using Kind = MissionFaultMode::Kind;
  if (mode.kind == Kind::crash_at && t >= mode.start) {
    out.mission_alive = false;
    return out;
  }
  if (mode.kind == Kind::fn_always) {
    return out;
  }
  const bool suppressed = mode.kind == Kind::fn_window && t >= mode.start && t < mode.end;

  for (const auto & o : truth) {
    if (o.far_face() < -rear_range || o.near_face() > sensor_range) {
      continue;
    }
    if (suppressed) {
      const bool recovered =
        mode.hint_recovery &&
        std::any_of(hints.begin(), hints.end(), [&](const auto & h) { return hint_covers(h, o); });
      if (!recovered) {
        continue;
      }
    }
    Detection d;
    d.source = lidar::DetectionSource::mission;
    d.obstacle_id = o.id;
    d.span = {o.near_face(), o.far_face(), o.lateral_min(), o.lateral_max(), o.height};
    d.confidence = 1.0;
    d.stamp = t;
    out.detections.push_back(d);
  }
  return out;
}

namespace
{

struct Interval
{
  double lo;
  double hi;
  bool overlaps(const Interval & o) const { return lo <= o.hi && o.lo <= hi; }
};

class PlanContext
{
public:
  PlanContext(
    const VehicleState & ego, std::span<const Detection> detections, const RoadSpec & road,
    const PlannerParams & params)
  : ego_(ego), detections_(detections), road_(road), params_(params)
  {
  }

  Interval world_lateral(const Detection & d) const
  {
    return {ego_.lateral + d.span.lateral_min, ego_.lateral + d.span.lateral_max};
  }

  Interval path() const
  {
    const double half = 0.5 * ego_.width + params_.lateral_clearance;
    return {ego_.lateral - half, ego_.lateral + half};
  }

  Interval lane_band(int lane) const
  {
    const double c = road_.lane_center(lane);
    return {c - 0.5 * road_.lane_width, c + 0.5 * road_.lane_width};
  }

  double stopping(double decel) const
  {
    const double v = ego_.velocity;
    return v * params_.policy.max_latency + v * v / (2.0 * decel) + params_.policy.safety_margin;
  }

  /// Far enough to either stop hard or complete a full lane change first.
  double lookahead() const
  {
    return std::max(
      params_.lookahead_factor * stopping(params_.policy.max_decel),
      ego_.velocity * params_.lane_change_duration + params_.standoff);
  }

  double lateral_rate() const { return road_.lane_width / params_.lane_change_duration; }

  /// Nearest detection ahead that overlaps the ego path.
  const Detection * blocking() const
  {
    const Detection * best = nullptr;
    for (const auto & d : detections_) {
      if (d.span.far < 0.0 || !world_lateral(d).overlaps(path())) {
        continue;
      }
      if (best == nullptr || d.span.near < best->span.near) {
        best = &d;
      }
    }
    return best;
  }

  bool lane_clear(int lane, double ahead) const
  {
    const Interval band = lane_band(lane);
    const Interval window{-ego_.length - params_.return_margin, ahead};
    return std::none_of(detections_.begin(), detections_.end(), [&](const Detection & d) {
      return world_lateral(d).overlaps(band) && Interval{d.span.near, d.span.far}.overlaps(window);
    });
  }

  /// Lane change around @p obstacle toward @p lane is possible in the remaining gap.
  bool can_change(int lane, const Detection & obstacle) const
  {
    if (!road_.has_lane(lane) || lane == ego_.lane) {
      return false;
    }
    const double gap = std::max(0.0, obstacle.span.near);
    if (!lane_clear(lane, gap + params_.gap_length)) {
      return false;
    }
    const Interval obs = world_lateral(obstacle);
    const double half = 0.5 * ego_.width + params_.lateral_clearance;
    const double shift =
      lane > ego_.lane ? obs.hi + half - ego_.lateral : ego_.lateral - (obs.lo - half);
    if (shift > road_.lane_width * std::abs(lane - ego_.lane)) {
      return false;
    }
    const double t_clear = std::max(0.0, shift) / lateral_rate();
    return gap >= ego_.velocity * t_clear + params_.standoff;
  }

  double cruise_accel(double target_speed) const
  {
    return std::clamp(
      params_.speed_gain * (target_speed - ego_.velocity), -params_.comfort_decel,
      params_.cruise_accel);
  }

  double brake_accel(const Detection * obstacle) const
  {
    if (ego_.velocity <= 0.0) {
      return 0.0;
    }
    const double gap = obstacle != nullptr ? std::max(0.0, obstacle->span.near) : 1e9;
    return stopping(params_.comfort_decel) <= gap ? -params_.comfort_decel
                                                  : -params_.policy.max_decel;
  }

private:
  const VehicleState & ego_;
  std::span<const Detection> detections_;
  const RoadSpec & road_;
  const PlannerParams & params_;
};

LaneChange direction(int from, int to)
{
  if (to > from) {
    return LaneChange::left;
  }
  return to < from ? LaneChange::right : LaneChange::none;
}

}  // namespace

PlanResult mission_plan(
  const PlannerState & state, const VehicleState & ego, std::span<const Detection> detections,
  const MissionGoal & goal, const RoadSpec & road, const PlannerParams & params)
{
  const PlanContext ctx(ego, detections, road, params);
  PlanResult out{ControlCommand{}, state};
  ControlCommand & cmd = out.command;
  PlannerState & next = out.state;
  cmd.source = CommandSource::mission;

  const Detection * block = ctx.blocking();
  const bool block_in_lookahead = block != nullptr && block->span.near <= ctx.lookahead();

  if (goal.abandon) {
    next.phase = PlannerPhase::brake;
    cmd.accel = ctx.brake_accel(block);
    return out;
  }

  switch (state.phase) {
    case PlannerPhase::cruise: {
      if (!block_in_lookahead) {
        cmd.accel = ctx.cruise_accel(goal.target_speed);
        break;
      }
      for (int lane : {ego.lane + 1, ego.lane - 1}) {
        if (ctx.can_change(lane, *block)) {
          next.phase = PlannerPhase::change;
          next.home_lane = ego.lane;
          next.target_lane = lane;
          cmd.lane_change = direction(ego.lane, lane);
          cmd.accel = ctx.cruise_accel(goal.target_speed);
          return out;
        }
      }
      next.phase = PlannerPhase::brake;
      cmd.accel = ctx.brake_accel(block);
      break;
    }
    case PlannerPhase::change:
    case PlannerPhase::ret: {
      if (ego.lane == state.target_lane && !ego.changing_lane()) {
        next.phase = state.phase == PlannerPhase::change ? PlannerPhase::pass : PlannerPhase::cruise;
      } else if (ego.target_lane != state.target_lane) {
        cmd.lane_change = direction(ego.lane, state.target_lane);
      }
      cmd.accel = ctx.cruise_accel(goal.target_speed);
      break;
    }
    case PlannerPhase::pass: {
      if (ctx.lane_clear(state.home_lane, ctx.lookahead())) {
        next.phase = PlannerPhase::ret;
        next.target_lane = state.home_lane;
        cmd.lane_change = direction(ego.lane, state.home_lane);
      }
      cmd.accel = ctx.cruise_accel(goal.target_speed);
      break;
    }
    case PlannerPhase::brake: {
      const bool still_blocked =
        block != nullptr && block->span.near <= std::max(ctx.lookahead(), params.gap_length);
      if (!still_blocked) {
        next.phase = PlannerPhase::cruise;
        cmd.accel = ctx.cruise_accel(goal.target_speed);
      } else {
        cmd.accel = ctx.brake_accel(block);
      }
      break;
    }
  }
  return out;
}

const char * to_string(PlannerPhase phase)
{
  switch (phase) {
    case PlannerPhase::cruise:
      return "cruise";
    case PlannerPhase::change:
      return "change";
    case PlannerPhase::pass:
      return "pass";
    case PlannerPhase::ret:
      return "return";
    case PlannerPhase::brake:
      return "brake";
  }
  return "?";
}

}  // namespace synergy::mission
