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

// Acceptance checks, one line per criterion. Exits nonzero if any fails.

#include "synergy/envelope.hpp"
#include "synergy/guardian.hpp"
#include "synergy/harness.hpp"
#include "synergy/lidar_sim.hpp"
#include "synergy/vehicle_sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace synergy;

namespace
{

struct Verdict
{
  bool pass{false};
  std::string detail;
};

const envelope::SafetyPolicy kEvaluationPolicy{0.75, 0.1, 7.5, 0.01};

Verdict safe_speed()
{
  envelope::LidarSpec lidar = lidar::default_lidar();
  lidar.max_range_clear = 100.0;
  const double v = envelope::weather_adjusted_safe_velocity(
    kEvaluationPolicy, envelope::kDefaultDetectability, lidar, envelope::clear_weather());
  char buf[64];
  std::snprintf(buf, sizeof buf, "v_safe_max=%.4f", v);
  return {std::abs(v - 17.71) <= 0.01, buf};
}

Verdict weather_rule()
{
  const envelope::SafetyPolicy ideal{0.75, 0.0, 7.5, 0.0};
  auto lidar = lidar::default_lidar();
  lidar.max_range_clear = 20.0;  // below the 21.19 m guarantee, so range limited
  const auto model = envelope::kDefaultDetectability;
  const double clear = envelope::weather_adjusted_safe_velocity(ideal, model, lidar, envelope::clear_weather());
  const double fog = envelope::weather_adjusted_safe_velocity(ideal, model, lidar, envelope::fog_weather()) / clear;
  const double haze = envelope::weather_adjusted_safe_velocity(ideal, model, lidar, envelope::haze_weather()) / clear;
  char buf[96];
  std::snprintf(buf, sizeof buf, "fog=%.4f haze=%.4f", fog, haze);
  return {std::abs(fog - 0.100) <= 0.002 && std::abs(haze - 0.316) <= 0.005, buf};
}

const harness::GridReport & evaluation_report()
{
  static const harness::GridReport report = harness::run_grid(harness::evaluation_grid(), sim::ScenarioConfig{}, 8);
  return report;
}

Verdict fault_equivalence()
{
  const auto & r = evaluation_report();
  int compared = 0;
  int mismatched = 0;
  int collisions = 0;
  for (const auto & [key, outcome] : r.cells) {
    if (key.mode != sim::AgentMode::sr_fault_injected || key.v0 > 17.71) {
      continue;
    }
    ++compared;
    const auto crash = r.cells.at({sim::AgentMode::sr_mission_crash, key.v0, key.d0});
    mismatched += outcome != crash;
    collisions += outcome == sim::Outcome::collision && key.d0 >= envelope::stopping_distance(key.v0, kEvaluationPolicy);
  }
  return {compared > 0 && mismatched == 0 && collisions == 0,
          "cells=" + std::to_string(compared) + " mismatched=" + std::to_string(mismatched) +
            " avoidable_collisions=" + std::to_string(collisions)};
}

Verdict feasibility_frontier()
{
  const auto & r = evaluation_report();
  const auto g = harness::evaluation_grid();
  int misplaced = 0;
  for (double v0 : g.v0_values) {
    const double need = v0 * 0.01 + v0 * v0 / 15.0;
    // The boundary may fall anywhere in the cell straddling the curve; every
    // cell at least one step clear of it must be on the predicted side.
    for (std::size_t j = 0; j < g.d0_values.size(); ++j) {
      const double d0 = g.d0_values[j];
      const auto outcome = r.cells.at({sim::AgentMode::sr_mission_crash, v0, d0});
      const bool below = j + 1 < g.d0_values.size() && g.d0_values[j + 1] < need;
      const bool above = j > 0 && g.d0_values[j - 1] >= need;
      if (below && outcome != sim::Outcome::collision) {
        ++misplaced;
      }
      if (above && outcome == sim::Outcome::collision) {
        ++misplaced;
      }
    }
  }
  return {misplaced == 0, "misplaced_cells=" + std::to_string(misplaced)};
}

Verdict detectability_sweep()
{
  const auto lidar = lidar::default_lidar();
  const lidar::ClusterParams cluster{};
  const lidar::SweepSpec probe{};
  int checked = 0;
  int missed = 0;
  for (double x = 25.0; x > lidar.near_blind_range; x -= 0.5) {
    for (int k = 1; k <= 80; ++k) {
      const double h = 0.05 * k;
      if (h < envelope::kDefaultDetectability.slope * x + envelope::kDefaultDetectability.intercept) {
        continue;
      }
      ++checked;
      missed += !lidar::probe_detected(lidar, cluster, probe, x, h);
    }
  }
  lidar::SweepSpec sweep;
  sweep.jobs = 8;
  const auto derived = lidar::derive_detectability_line(lidar, cluster, sweep);
  bool bounds = derived.model.has_value();
  for (const auto & p : derived.frontier) {
    bounds = bounds && p.detectable &&
             derived.model->slope * p.range + derived.model->intercept >= p.min_height - 1e-9;
  }
  char buf[128];
  std::snprintf(
    buf, sizeof buf, "probes=%d missed=%d derived=%.5fx%+.5f", checked, missed,
    bounds ? derived.model->slope : 0.0, bounds ? derived.model->intercept : 0.0);
  return {missed == 0 && bounds, buf};
}

Verdict guardian_soundness()
{
  using namespace guardian;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> accel(-10.0, 5.0);
  std::uniform_real_distribution<double> speed(0.0, 17.7);
  std::uniform_real_distribution<double> near(0.0, 60.0);
  std::uniform_int_distribution<int> lane(0, 2);
  const LateralInterval ego{-0.95, 0.95};
  int critical_frames = 0;
  int clean_frames = 0;
  int violations = 0;
  for (int frame = 0; frame < 10000; ++frame) {
    const double v = speed(rng);
    const double t = frame * 0.01;
    std::vector<lidar::Detection> safety;
    const int n = static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      const double x = near(rng);
      const double y = (lane(rng) - 1) * 3.5;
      lidar::Detection d;
      d.span = {x, x + 2.0, y - 0.9, y + 0.9, 1.0};
      d.stamp = t;
      safety.push_back(d);
    }
    std::vector<lidar::Detection> mission;
    for (const auto & s : safety) {
      if (rng() % 2 == 0) {
        auto m = s;
        m.source = lidar::DetectionSource::mission;
        mission.push_back(m);
      }
    }
    auto faults = compare_detections(safety, mission);
    for (auto & f : faults) {
      f = assess_criticality(f, v, ego, kEvaluationPolicy);
    }
    Guardian g;
    const ConstraintStatus status{17.71, true, false, false};
    const auto decision = g.decide_response(faults, status, true, safety);
    const ControlCommand cmd{accel(rng), static_cast<LaneChange>(lane(rng)), CommandSource::mission, false};
    const auto out = arbitrate_control(cmd, decision, v, kEvaluationPolicy, 0.01);

    const double reach = v * 0.01 + v * v / 15.0 + 0.1 + 0.5;
    const bool critical = std::any_of(faults.begin(), faults.end(), [&](const FaultEvent & f) {
      const auto & sp = f.detection.span;
      return sp.lateral_min <= 1.25 && sp.lateral_max >= -1.25 && sp.near <= reach;
    });
    if (critical) {
      ++critical_frames;
      violations += out.accel != -7.5 || out.lane_change != LaneChange::none;
    }
    if (faults.empty()) {
      ++clean_frames;
      violations += !(out == cmd);
    }
  }
  return {violations == 0 && critical_frames > 0 && clean_frames > 0,
          "critical=" + std::to_string(critical_frames) + " clean=" + std::to_string(clean_frames) +
            " violations=" + std::to_string(violations)};
}

Verdict determinism()
{
  std::ostringstream one;
  std::ostringstream eight;
  harness::emit_csv(harness::run_grid(harness::evaluation_grid(), {}, 1), one);
  harness::emit_csv(evaluation_report(), eight);
  return {one.str() == eight.str(), "bytes=" + std::to_string(one.str().size())};
}

Verdict integrator()
{
  const double dt = 0.01;
  double worst = 0.0;
  bool ok = true;
  for (double v0 = 5.0; v0 <= 40.0; v0 += 5.0) {
    sim::ActuationDelay delay(0.01);
    VehicleState s;
    s.velocity = v0;
    const ControlCommand brake{-7.5, LaneChange::none, CommandSource::guardian, false};
    for (int k = 0; s.velocity > 0.0; ++k) {
      s = sim::step(s, brake, k * dt, dt, delay, {}, {});
    }
    const double err = std::abs(s.position - (v0 * 0.01 + v0 * v0 / 15.0));
    worst = std::max(worst, err / (dt * v0));
    ok = ok && err <= dt * v0;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "worst_error=%.3f*dt*v0", worst);
  return {ok, buf};
}

}  // namespace

int main()
{
  const std::pair<const char *, std::function<Verdict()>> criteria[] = {
    {"safe speed reproduction", safe_speed},
    {"weather rule of thumb", weather_rule},
    {"fault-injected equivalence", fault_equivalence},
    {"feasibility frontier", feasibility_frontier},
    {"detectability soundness sweep", detectability_sweep},
    {"guardian soundness", guardian_soundness},
    {"determinism across job counts", determinism},
    {"integrator accuracy", integrator},
  };
  int failures = 0;
  int index = 1;
  for (const auto & [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception & e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s: %s (%.2fs)\n", v.pass ? "PASS" : "FAIL", index++, name, v.detail.c_str(), secs);
    failures += !v.pass;
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
