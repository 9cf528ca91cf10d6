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
 * @file lidar_sim.hpp
 * @brief Geometric LiDAR stand-in for the safety-layer obstacle detector.
 *
 * Beams are cast from the sensor origin (x forward, y left, z up; the sensor
 * sits at height mount_height above a flat ground plane z = 0) against
 * axis-aligned box obstacles. Returns are clustered on the range image into
 * obstacle detections. derive_detectability_line() is the brute-force oracle
 * that recovers a linear detectability guarantee for any beam geometry.
 */

#ifndef SYNERGY__LIDAR_SIM_HPP_
#define SYNERGY__LIDAR_SIM_HPP_

#include "synergy/envelope.hpp"

#include <optional>
#include <span>
#include <vector>

namespace synergy::lidar
{

using envelope::DetectabilityModel;
using envelope::LidarSpec;

/// Ground-truth box obstacle, in the sensor frame. center_distance may be
/// negative (behind the sensor); the frontal detector ignores such obstacles.
struct ObstacleTruth
{
  int id{0};
  double center_distance{0.0};  ///< [m] longitudinal, to the box center
  double lateral_offset{0.0};   ///< [m]
  double height{1.5};           ///< [m]
  double width{1.9};            ///< [m]
  double length{4.8};           ///< [m]
  double velocity{0.0};         ///< [m/s] longitudinal

  double near_face() const { return center_distance - 0.5 * length; }
  double far_face() const { return center_distance + 0.5 * length; }
  double lateral_min() const { return lateral_offset - 0.5 * width; }
  double lateral_max() const { return lateral_offset + 0.5 * width; }
};

void validate(const ObstacleTruth & obstacle);

struct BoundingSpan
{
  double near{0.0};
  double far{0.0};
  double lateral_min{0.0};
  double lateral_max{0.0};
  double top{0.0};

  double center_x() const { return 0.5 * (near + far); }
  double center_y() const { return 0.5 * (lateral_min + lateral_max); }
  bool operator==(const BoundingSpan &) const = default;
};

enum class DetectionSource { safety, mission };

struct Detection
{
  DetectionSource source{DetectionSource::safety};
  int obstacle_id{-1};  ///< ground-truth link for the harness; the guardian never reads it
  BoundingSpan span;
  double confidence{1.0};
  double stamp{0.0};  ///< [s] frame timestamp
  bool operator==(const Detection &) const = default;
};

enum class ReturnKind { none, ground, obstacle };

struct BeamReturn
{
  ReturnKind kind{ReturnKind::none};
  double range{0.0};  ///< [m] along the beam
  double x{0.0};
  double y{0.0};
  double z{0.0};
  int obstacle_id{-1};
};

/// Range image restricted to the azimuth columns that can see an obstacle.
struct ScanReturns
{
  int rows{0};
  std::vector<int> columns;  ///< global azimuth indices (azimuth = index * resolution), ascending
  std::vector<BeamReturn> hits;  ///< row-major, rows * columns.size()
  double stamp{0.0};

  const BeamReturn & at(int row, std::size_t col) const { return hits[row * columns.size() + col]; }
};

struct ClusterParams
{
  int min_rows{2};
  int min_cols{2};
  double cluster_gap{0.5};  ///< [m] max range jump between neighboring returns
};

/// Safety sensor suite: the LiDAR detector plus near-field proximity sensors,
/// which are modeled as perfect inside near_blind_range.
struct SafetySensorParams
{
  ClusterParams cluster;
  double proximity_lateral_reach{4.0};  ///< [m]
};

/// First-surface ray cast of every beam against the obstacles and the ground.
/// Hits farther than max_range along the beam are reported as no-return.
ScanReturns cast_returns(
  const LidarSpec & lidar, std::span<const ObstacleTruth> obstacles, double max_range,
  double stamp = 0.0);

/// Connected components over the range image. Output is sorted by near range,
/// then lateral_min.
std::vector<Detection> detect_obstacles(const ScanReturns & returns, const ClusterParams & params);

/// Full safety-layer perception for one frame: LiDAR clusters within
/// max_range plus proximity detections within the blind range.
std::vector<Detection> perceive_safety(
  const LidarSpec & lidar, std::span<const ObstacleTruth> obstacles, double max_range,
  const SafetySensorParams & params, double stamp);

/// Uniformly spaced elevations between the given angles [deg].
LidarSpec uniform_lidar(
  int beams, double elevation_min_deg, double elevation_max_deg, double mount_height,
  double max_range_clear, double horizontal_resolution_deg, double near_blind_range);

/// 32 beams from -15.5 to +9.3 deg, 0.4 deg azimuth steps, mounted at 1.8 m,
/// 100 m clear-weather range, 905 nm. Validated against kDefaultDetectability.
LidarSpec default_lidar();

struct SweepSpec
{
  double range_min{6.7};
  double range_max{25.0};
  double range_step{0.5};
  int sub_offsets{4};        ///< probe positions per range cell
  double height_max{4.0};
  double height_tolerance{1e-4};
  double probe_width{2.0};   ///< full-width obstacle
  double probe_length{0.2};  ///< thin panel: only the face is visible
  int jobs{1};
};

struct FrontierPoint
{
  double range{0.0};
  double min_height{0.0};  ///< smallest always-detected height over the cell's offsets
  bool detectable{false};  ///< false when even height_max is missed somewhere in the cell
};

struct DerivedModel
{
  std::optional<DetectabilityModel> model;  ///< absent when no finite guarantee line exists
  std::vector<FrontierPoint> frontier;
};

/// True when a probe panel of the given height with its face at @p range is detected.
bool probe_detected(
  const LidarSpec & lidar, const ClusterParams & params, const SweepSpec & sweep, double range,
  double height);

/// Brute-force detectability oracle. For every range cell finds by bisection
/// the minimum height detected at all sub-offsets, then returns the tightest
/// line lying on or above every frontier point (the upper-hull edge spanning
/// the middle of the swept range). Throws InvalidInput for fewer than 10
/// range samples.
DerivedModel derive_detectability_line(
  const LidarSpec & lidar, const ClusterParams & params, const SweepSpec & sweep);

}  // namespace synergy::lidar

#endif  // SYNERGY__LIDAR_SIM_HPP_
