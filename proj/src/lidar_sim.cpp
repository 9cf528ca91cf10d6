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

#include "synergy/lidar_sim.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

namespace synergy::lidar
{

using detail::require;

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Slab test against [lo, hi] on one axis. Narrows [t_enter, t_exit].
bool clip_axis(double origin, double dir, double lo, double hi, double & t_enter, double & t_exit)
{
  if (dir == 0.0) {
    return origin >= lo && origin <= hi;
  }
  double t0 = (lo - origin) / dir;
  double t1 = (hi - origin) / dir;
  if (t0 > t1) {
    std::swap(t0, t1);
  }
  t_enter = std::max(t_enter, t0);
  t_exit = std::min(t_exit, t1);
  return t_enter <= t_exit;
}

// Entry distance of the ray into the obstacle box, or +inf.
double intersect_box(
  double oz, double dx, double dy, double dz, const ObstacleTruth & obstacle)
{
  double t_enter = 0.0;
  double t_exit = kInf;
  if (!clip_axis(0.0, dx, obstacle.near_face(), obstacle.far_face(), t_enter, t_exit)) {
    return kInf;
  }
  if (!clip_axis(0.0, dy, obstacle.lateral_min(), obstacle.lateral_max(), t_enter, t_exit)) {
    return kInf;
  }
  if (!clip_axis(oz, dz, 0.0, obstacle.height, t_enter, t_exit)) {
    return kInf;
  }
  return t_enter;
}

bool is_frontal(const ObstacleTruth & o, double max_range)
{
  return o.near_face() > 0.0 && o.near_face() < max_range;
}

std::vector<int> visible_columns(
  const LidarSpec & lidar, std::span<const ObstacleTruth> obstacles, double max_range)
{
  std::vector<int> columns;
  const double res = lidar.horizontal_resolution;
  for (const auto & o : obstacles) {
    if (!is_frontal(o, max_range)) {
      continue;
    }
    double az_min = kInf;
    double az_max = -kInf;
    for (double x : {o.near_face(), o.far_face()}) {
      for (double y : {o.lateral_min(), o.lateral_max()}) {
        const double az = std::atan2(y, x);
        az_min = std::min(az_min, az);
        az_max = std::max(az_max, az);
      }
    }
    const int k_lo = static_cast<int>(std::floor(az_min / res)) - 1;
    const int k_hi = static_cast<int>(std::ceil(az_max / res)) + 1;
    for (int k = k_lo; k <= k_hi; ++k) {
      columns.push_back(k);
    }
  }
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  return columns;
}

bool spans_touch(const BoundingSpan & a, const BoundingSpan & b)
{
  return a.near <= b.far && b.near <= a.far && a.lateral_min <= b.lateral_max &&
         b.lateral_min <= a.lateral_max;
}

void sort_detections(std::vector<Detection> & detections)
{
  std::stable_sort(detections.begin(), detections.end(), [](const auto & a, const auto & b) {
    if (a.span.near != b.span.near) {
      return a.span.near < b.span.near;
    }
    return a.span.lateral_min < b.span.lateral_min;
  });
}

}  // namespace

void validate(const ObstacleTruth & obstacle)
{
  require(obstacle.height > 0.0, "obstacle height must be > 0");
  require(obstacle.width > 0.0, "obstacle width must be > 0");
  require(obstacle.length > 0.0, "obstacle length must be > 0");
}

ScanReturns cast_returns(
  const LidarSpec & lidar, std::span<const ObstacleTruth> obstacles, double max_range,
  double stamp)
{
  require(max_range > 0.0, "max range must be > 0");
  envelope::validate(lidar);

  ScanReturns scan;
  scan.rows = static_cast<int>(lidar.beam_elevations.size());
  scan.columns = visible_columns(lidar, obstacles, max_range);
  scan.stamp = stamp;
  scan.hits.resize(scan.rows * scan.columns.size());

  const double oz = lidar.mount_height;
  for (int r = 0; r < scan.rows; ++r) {
    const double e = lidar.beam_elevations[r];
    const double ce = std::cos(e);
    const double dz = std::sin(e);
    const double t_ground = dz < 0.0 ? oz / -dz : kInf;
    for (std::size_t c = 0; c < scan.columns.size(); ++c) {
      const double az = scan.columns[c] * lidar.horizontal_resolution;
      const double dx = ce * std::cos(az);
      const double dy = ce * std::sin(az);

      double best = t_ground;
      int best_id = -1;
      for (const auto & o : obstacles) {
        if (!is_frontal(o, max_range)) {
          continue;
        }
        const double t = intersect_box(oz, dx, dy, dz, o);
        if (t < best) {
          best = t;
          best_id = o.id;
        }
      }

      BeamReturn & hit = scan.hits[r * scan.columns.size() + c];
      if (best > max_range) {
        continue;
      }
      hit.kind = best_id >= 0 ? ReturnKind::obstacle : ReturnKind::ground;
      hit.range = best;
      hit.x = best * dx;
      hit.y = best * dy;
      hit.z = best_id >= 0 ? oz + best * dz : 0.0;
      hit.obstacle_id = best_id;
    }
  }
  return scan;
}

std::vector<Detection> detect_obstacles(const ScanReturns & returns, const ClusterParams & params)
{
  require(params.min_rows >= 1, "min_rows must be >= 1");
  require(params.min_cols >= 1, "min_cols must be >= 1");

  const int rows = returns.rows;
  const std::size_t cols = returns.columns.size();
  std::vector<int> label(rows * cols, -1);
  std::vector<Detection> detections;

  auto is_obstacle = [&](int r, std::size_t c) {
    return returns.at(r, c).kind == ReturnKind::obstacle;
  };

  std::vector<std::pair<int, std::size_t>> stack;
  int next_label = 0;
  for (int r0 = 0; r0 < rows; ++r0) {
    for (std::size_t c0 = 0; c0 < cols; ++c0) {
      if (!is_obstacle(r0, c0) || label[r0 * cols + c0] >= 0) {
        continue;
      }
      const int id = next_label++;
      std::vector<bool> row_seen(rows, false);
      std::vector<int> col_seen;
      std::map<int, int> votes;
      BoundingSpan span{kInf, -kInf, kInf, -kInf, -kInf};

      label[r0 * cols + c0] = id;
      stack.assign(1, {r0, c0});
      while (!stack.empty()) {
        const auto [r, c] = stack.back();
        stack.pop_back();
        const BeamReturn & hit = returns.at(r, c);
        row_seen[r] = true;
        col_seen.push_back(returns.columns[c]);
        ++votes[hit.obstacle_id];
        span.near = std::min(span.near, hit.x);
        span.far = std::max(span.far, hit.x);
        span.lateral_min = std::min(span.lateral_min, hit.y);
        span.lateral_max = std::max(span.lateral_max, hit.y);
        span.top = std::max(span.top, hit.z);

        auto visit = [&](int nr, std::size_t nc) {
          if (!is_obstacle(nr, nc) || label[nr * cols + nc] >= 0) {
            return;
          }
          if (std::abs(returns.at(nr, nc).range - hit.range) >= params.cluster_gap) {
            return;
          }
          label[nr * cols + nc] = id;
          stack.emplace_back(nr, nc);
        };
        if (r > 0) {
          visit(r - 1, c);
        }
        if (r + 1 < rows) {
          visit(r + 1, c);
        }
        if (c > 0 && returns.columns[c - 1] + 1 == returns.columns[c]) {
          visit(r, c - 1);
        }
        if (c + 1 < cols && returns.columns[c] + 1 == returns.columns[c + 1]) {
          visit(r, c + 1);
        }
      }

      const int n_rows = static_cast<int>(std::count(row_seen.begin(), row_seen.end(), true));
      std::sort(col_seen.begin(), col_seen.end());
      const int n_cols = static_cast<int>(
        std::unique(col_seen.begin(), col_seen.end()) - col_seen.begin());
      if (n_rows < params.min_rows || n_cols < params.min_cols) {
        continue;
      }

      Detection d;
      d.source = DetectionSource::safety;
      d.obstacle_id = std::max_element(votes.begin(), votes.end(), [](auto & a, auto & b) {
                        return a.second < b.second;
                      })->first;
      d.span = span;
      d.confidence = 1.0;
      d.stamp = returns.stamp;
      detections.push_back(d);
    }
  }
  sort_detections(detections);
  return detections;
}

std::vector<Detection> perceive_safety(
  const LidarSpec & lidar, std::span<const ObstacleTruth> obstacles, double max_range,
  const SafetySensorParams & params, double stamp)
{
  std::vector<Detection> proximity;
  for (const auto & o : obstacles) {
    const bool ahead_or_beside = o.far_face() >= 0.0 && o.near_face() <= lidar.near_blind_range;
    const bool in_reach = o.lateral_min() <= params.proximity_lateral_reach &&
                          o.lateral_max() >= -params.proximity_lateral_reach;
    if (!ahead_or_beside || !in_reach) {
      continue;
    }
    Detection d;
    d.source = DetectionSource::safety;
    d.obstacle_id = o.id;
    d.span = {std::max(0.0, o.near_face()), o.far_face(), o.lateral_min(), o.lateral_max(),
              o.height};
    d.stamp = stamp;
    proximity.push_back(d);
  }

  std::vector<Detection> out;
  if (max_range > 0.0) {
    out = detect_obstacles(cast_returns(lidar, obstacles, max_range, stamp), params.cluster);
  }
  std::erase_if(out, [&](const Detection & d) {
    return std::any_of(proximity.begin(), proximity.end(), [&](const Detection & p) {
      return spans_touch(d.span, p.span);
    });
  });
  out.insert(out.end(), proximity.begin(), proximity.end());
  sort_detections(out);
  return out;
}

LidarSpec uniform_lidar(
  int beams, double elevation_min_deg, double elevation_max_deg, double mount_height,
  double max_range_clear, double horizontal_resolution_deg, double near_blind_range)
{
  require(beams >= 1, "need at least one beam");
  LidarSpec lidar;
  lidar.beam_elevations.reserve(beams);
  for (int i = 0; i < beams; ++i) {
    const double frac = beams == 1 ? 0.0 : static_cast<double>(i) / (beams - 1);
    lidar.beam_elevations.push_back(
      deg2rad(elevation_min_deg + frac * (elevation_max_deg - elevation_min_deg)));
  }
  lidar.horizontal_resolution = deg2rad(horizontal_resolution_deg);
  lidar.mount_height = mount_height;
  lidar.max_range_clear = max_range_clear;
  lidar.wavelength = 0.905;
  lidar.near_blind_range = near_blind_range;
  envelope::validate(lidar);
  return lidar;
}

LidarSpec default_lidar() { return uniform_lidar(32, -15.5, 9.3, 1.8, 100.0, 0.4, 6.7); }

bool probe_detected(
  const LidarSpec & lidar, const ClusterParams & params, const SweepSpec & sweep, double range,
  double height)
{
  const ObstacleTruth probe{
    0, range + 0.5 * sweep.probe_length, 0.0, height, sweep.probe_width, sweep.probe_length, 0.0};
  const auto scan = cast_returns(lidar, std::span(&probe, 1), lidar.max_range_clear);
  for (const auto & d : detect_obstacles(scan, params)) {
    if (d.obstacle_id == probe.id) {
      return true;
    }
  }
  return false;
}

namespace
{

FrontierPoint frontier_at(
  const LidarSpec & lidar, const ClusterParams & params, const SweepSpec & sweep, double x0)
{
  FrontierPoint point{x0, 0.0, true};
  for (int j = 0; j < sweep.sub_offsets; ++j) {
    const double x = x0 + j * sweep.range_step / sweep.sub_offsets;
    if (j > 0 && x > sweep.range_max) {
      break;
    }
    if (!probe_detected(lidar, params, sweep, x, sweep.height_max)) {
      point.detectable = false;
      point.min_height = sweep.height_max;
      return point;
    }
    double lo = 0.0;
    double hi = sweep.height_max;
    while (hi - lo > sweep.height_tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (probe_detected(lidar, params, sweep, x, mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    point.min_height = std::max(point.min_height, hi);
  }
  return point;
}

// Upper-hull edge over the middle of the swept range.
std::optional<DetectabilityModel> tightest_upper_line(const std::vector<FrontierPoint> & points)
{
  std::vector<const FrontierPoint *> hull;
  auto cross = [](const FrontierPoint * o, const FrontierPoint * a, const FrontierPoint * b) {
    return (a->range - o->range) * (b->min_height - o->min_height) -
           (a->min_height - o->min_height) * (b->range - o->range);
  };
  for (const auto & p : points) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), &p) >= 0.0) {
      hull.pop_back();
    }
    hull.push_back(&p);
  }
  const double x_mid = 0.5 * (points.front().range + points.back().range);
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    if (hull[i + 1]->range >= x_mid) {
      const double slope =
        (hull[i + 1]->min_height - hull[i]->min_height) / (hull[i + 1]->range - hull[i]->range);
      if (!(slope > 0.0)) {
        return std::nullopt;
      }
      return DetectabilityModel{slope, hull[i]->min_height - slope * hull[i]->range};
    }
  }
  return std::nullopt;
}

}  // namespace

DerivedModel derive_detectability_line(
  const LidarSpec & lidar, const ClusterParams & params, const SweepSpec & sweep)
{
  envelope::validate(lidar);
  require(sweep.range_step > 0.0, "range step must be > 0");
  require(sweep.range_max > sweep.range_min, "range_max must exceed range_min");
  require(sweep.height_max > 0.0, "height_max must be > 0");
  require(sweep.sub_offsets >= 1, "sub_offsets must be >= 1");
  require(sweep.height_tolerance > 0.0, "height tolerance must be > 0");

  // Samples start one step past range_min: the swept interval is (range_min, range_max].
  const auto samples =
    static_cast<std::size_t>(std::floor((sweep.range_max - sweep.range_min) / sweep.range_step + 1e-9));
  require(samples >= 10, "sweep too coarse: need at least 10 range samples");

  DerivedModel result;
  result.frontier.resize(samples);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < samples; i = next++) {
      const double x = sweep.range_min + (i + 1) * sweep.range_step;
      result.frontier[i] = frontier_at(lidar, params, sweep, x);
    }
  };
  const int jobs = std::max(1, sweep.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back(worker);
    }
  }

  const bool all_detectable = std::all_of(
    result.frontier.begin(), result.frontier.end(), [](const auto & p) { return p.detectable; });
  if (all_detectable) {
    result.model = tightest_upper_line(result.frontier);
  }
  return result;
}

}  // namespace synergy::lidar
