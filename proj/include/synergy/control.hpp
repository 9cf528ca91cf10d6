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

#ifndef SYNERGY__CONTROL_HPP_
#define SYNERGY__CONTROL_HPP_

namespace synergy
{

enum class LaneChange { none, left, right };
enum class CommandSource { mission, guardian };

/// Actuation request. accel < 0 brakes. lane_change is a one-shot request to
/// start moving toward the neighboring lane; it is ignored while a change is
/// already under way.
struct ControlCommand
{
  double accel{0.0};  ///< [m/s^2]
  LaneChange lane_change{LaneChange::none};
  CommandSource source{CommandSource::mission};
  bool abandon_mission{false};  ///< set by the guardian: the mission must stop in lane

  bool operator==(const ControlCommand &) const = default;
};

/// Ego kinematic state. position is the longitudinal coordinate of the front
/// bumper, where the LiDAR sits; lateral is the vehicle center line.
struct VehicleState
{
  double position{0.0};  ///< [m]
  double lateral{0.0};   ///< [m]
  double velocity{0.0};  ///< [m/s], >= 0
  int lane{0};           ///< lane the vehicle is in, or leaving
  int target_lane{0};    ///< differs from lane while a lane change is in progress
  double length{4.9};    ///< [m]
  double width{1.9};     ///< [m]

  double rear() const { return position - length; }
  bool changing_lane() const { return target_lane != lane; }
};

struct RoadSpec
{
  int lanes{2};             ///< lane 0 is the rightmost; lanes increase to the left
  double lane_width{3.5};   ///< [m]

  double lane_center(int lane) const { return lane * lane_width; }
  bool has_lane(int lane) const { return lane >= 0 && lane < lanes; }
};

}  // namespace synergy

#endif  // SYNERGY__CONTROL_HPP_
