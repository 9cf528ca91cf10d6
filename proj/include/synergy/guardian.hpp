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
 * @file guardian.hpp
 * @brief Safety-layer fault handlers: constraint monitoring, false-negative
 *        detection by comparing layer outputs, criticality, response
 *        selection and control arbitration.
 *
 * All detection geometry is in the ego sensor frame (x forward from the
 * front bumper, y left of the vehicle center line).
 */

#ifndef SYNERGY__GUARDIAN_HPP_
#define SYNERGY__GUARDIAN_HPP_

#include "synergy/control.hpp"
#include "synergy/envelope.hpp"
#include "synergy/lidar_sim.hpp"

#include <span>
#include <vector>

namespace synergy::guardian
{

using lidar::BoundingSpan;
using lidar::Detection;

/// When a mission detection counts as covering a safety detection.
struct MatchPolicy
{
  bool require_center{true};
  double min_overlap{0.5};  ///< fraction of the safety span's footprint
};

struct GuardianParams
{
  MatchPolicy match;
  double risk_margin{0.5};         ///< [m] added to the stopping distance
  double lateral_margin{0.3};      ///< [m] beyond the ego half-width
  double v_min_operational{1.0};   ///< [m/s] below this cap the mission is abandoned
};

struct ConstraintStatus
{
  double velocity_cap{0.0};  ///< [m/s]
  bool lidar_valid{true};
  bool mission_abandon_requested{false};
  bool over_cap{false};  ///< ego speed above velocity_cap
};

enum class FaultKind { fn_obstacle_existence };

struct FaultEvent
{
  FaultKind kind{FaultKind::fn_obstacle_existence};
  Detection detection;  ///< the uncovered safety detection
  bool critical{false};
  bool in_path{false};  ///< lateral overlap with the inflated ego footprint
  double timestamp{0.0};
};

enum class Action { passthrough, velocity_limit, emergency_brake, mission_abandon };

struct GuardianDecision
{
  Action action{Action::passthrough};
  double cap{0.0};  ///< [m/s]
  std::vector<FaultEvent> faults;
  std::vector<BoundingSpan> region_hints;
};

struct LateralInterval
{
  double min{0.0};
  double max{0.0};
};

ConstraintStatus monitor_constraints(
  const envelope::WeatherCondition & weather, const envelope::LidarSpec & lidar,
  const envelope::DetectabilityModel & model, const envelope::SafetyPolicy & policy,
  double ego_velocity, const GuardianParams & params = {});

/// Fraction of @p span's footprint (longitudinal x lateral) covered by @p cover.
/// A zero-length axis counts as fully covered when its coordinate lies inside
/// the cover interval, so face-only LiDAR spans compare sensibly with boxes.
double overlap_fraction(const BoundingSpan & span, const BoundingSpan & cover);

/// One fault per safety detection that no mission detection adequately covers.
/// Throws InvalidInput when the detections carry different frame stamps.
std::vector<FaultEvent> compare_detections(
  std::span<const Detection> safety, std::span<const Detection> mission,
  const MatchPolicy & match = {});

/// Marks the fault critical when the obstacle is in the ego path and no
/// farther than the stopping distance plus risk margin. The obstacle is
/// treated as stationary.
FaultEvent assess_criticality(
  FaultEvent fault, double ego_velocity, const LateralInterval & ego_lane_span,
  const envelope::SafetyPolicy & policy, const GuardianParams & params = {});

/// Per-frame response selection. Holds one latch: once an emergency brake is
/// triggered by a critical fault, it stays engaged while an uncovered
/// detection remains in the ego path, and is released on the first frame
/// where none does (e.g. the mission layer starts seeing the obstacle).
class Guardian
{
public:
  explicit Guardian(GuardianParams params = {}) : params_(params) {}

  GuardianDecision decide_response(
    std::vector<FaultEvent> faults, const ConstraintStatus & status, bool mission_alive,
    std::span<const Detection> safety_detections);

  bool override_latched() const { return latched_; }
  const GuardianParams & params() const { return params_; }
  void reset() { latched_ = false; }

private:
  GuardianParams params_;
  bool latched_{false};
};

/// Applies the decision to the mission command. @p dt is the control period
/// used to bound next-step speed under a velocity limit.
ControlCommand arbitrate_control(
  const ControlCommand & mission_cmd, const GuardianDecision & decision, double ego_velocity,
  const envelope::SafetyPolicy & policy, double dt);

const char * to_string(Action action);

}  // namespace synergy::guardian

#endif  // SYNERGY__GUARDIAN_HPP_
