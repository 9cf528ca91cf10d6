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

#include "synergy/harness.hpp"

#include "synergy/error.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <thread>

namespace synergy::harness
{

using detail::require;

GridSpec evaluation_grid()
{
  GridSpec grid;
  for (int v = 5; v <= 40; v += 5) {
    grid.v0_values.push_back(v);
  }
  for (int d = 10; d <= 100; d += 10) {
    grid.d0_values.push_back(d);
  }
  grid.modes = {
    AgentMode::mission_only, AgentMode::sr, AgentMode::sr_fault_injected,
    AgentMode::sr_mission_crash};
  return grid;
}

void validate(const GridSpec & grid)
{
  require(!grid.v0_values.empty(), "grid needs at least one v0");
  require(!grid.d0_values.empty(), "grid needs at least one d0");
  require(!grid.modes.empty(), "grid needs at least one mode");
  require(grid.repetitions >= 1, "repetitions must be >= 1");
  auto unique = [](auto values) {
    std::sort(values.begin(), values.end());
    return std::adjacent_find(values.begin(), values.end()) == values.end();
  };
  require(
    unique(grid.v0_values) && unique(grid.d0_values) && unique(grid.modes),
    "grid values must be distinct");
}

Outcome worse(Outcome a, Outcome b)
{
  // Enum order is already worst first.
  return static_cast<int>(a) <= static_cast<int>(b) ? a : b;
}

namespace
{

std::uint64_t splitmix(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t milli(double value) { return static_cast<std::uint64_t>(std::llround(value * 1000.0)); }

}  // namespace

std::uint64_t cell_seed(std::uint64_t base, const CellKey & key, int repetition)
{
  std::uint64_t h = splitmix(base);
  for (std::uint64_t part :
       {static_cast<std::uint64_t>(key.mode), milli(key.v0), milli(key.d0),
        static_cast<std::uint64_t>(repetition)}) {
    h = splitmix(h ^ part);
  }
  return h;
}

GridReport run_grid(const GridSpec & grid, const sim::ScenarioConfig & base, int jobs)
{
  validate(grid);
  require(jobs >= 1, "jobs must be >= 1");

  struct Task
  {
    CellKey key;
    int repetition;
    sim::ScenarioConfig config;
  };
  std::vector<Task> tasks;
  std::vector<CellKey> keys;
  for (auto mode : grid.modes) {
    for (double v0 : grid.v0_values) {
      for (double d0 : grid.d0_values) {
        keys.push_back({mode, v0, d0});
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  for (const auto & key : keys) {
    for (int rep = 0; rep < grid.repetitions; ++rep) {
      sim::ScenarioConfig config = base;
      config.mode = key.mode;
      config.v0 = key.v0;
      config.d0 = key.d0;
      config.trajectory_stride = std::numeric_limits<int>::max();
      if (grid.noise) {
        config.noise = sim::NoiseSpec{cell_seed(grid.noise->seed, key, rep), grid.noise->accel_sigma};
      } else {
        config.noise.reset();
      }
      sim::validate(config);
      tasks.push_back({key, rep, std::move(config)});
    }
  }

  std::vector<RunRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto record = sim::run_scenario(tasks[i].config);
      rows[i] = RunRow{
        tasks[i].key, tasks[i].repetition, record.outcome, record.min_gap,
        record.collision_speed, record.final_time};
    }
  };
  {
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(jobs), tasks.size());
    std::vector<std::jthread> pool;
    for (std::size_t j = 1; j < count; ++j) {
      pool.emplace_back(worker);
    }
    worker();
  }

  GridReport report;
  report.v_safe_max =
    envelope::weather_adjusted_safe_velocity(base.policy, base.model, base.lidar, base.weather);
  report.max_decel = base.policy.max_decel;
  report.max_latency = base.policy.max_latency;
  for (const auto & row : rows) {
    auto [it, inserted] = report.cells.emplace(row.key, row.outcome);
    if (!inserted) {
      it->second = worse(it->second, row.outcome);
    }
  }
  for (const auto & [key, outcome] : report.cells) {
    auto & counts =
      key.v0 <= report.v_safe_max ? report.counts_within[key.mode] : report.counts_above[key.mode];
    ++counts[static_cast<std::size_t>(outcome)];
  }
  report.rows = std::move(rows);
  return report;
}

namespace
{

constexpr const char * kCsvHeader = "v0,d0,mode,outcome,min_gap,collision_speed,final_time";

std::string fixed3(double value)
{
  // Avoid "-0.000" so equal values always print identically.
  if (std::abs(value) < 0.0005) {
    value = 0.0;
  }
  return fmt::format("{:.3f}", value);
}

double parse_number(const std::string & text)
{
  double value = 0.0;
  const auto * end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  require(ec == std::errc{} && ptr == end, "malformed number in CSV");
  return value;
}

std::vector<std::string> split(const std::string & line, char sep)
{
  std::vector<std::string> parts;
  std::size_t begin = 0;
  for (std::size_t pos; (pos = line.find(sep, begin)) != std::string::npos; begin = pos + 1) {
    parts.push_back(line.substr(begin, pos - begin));
  }
  parts.push_back(line.substr(begin));
  return parts;
}

}  // namespace

void emit_csv(const GridReport & report, std::ostream & out)
{
  out << kCsvHeader << '\n';
  for (const auto & r : report.rows) {
    out << fmt::format(
      "{},{},{},{},{},{},{}\n", fixed3(r.key.v0), fixed3(r.key.d0), sim::to_string(r.key.mode),
      sim::to_string(r.outcome), fixed3(r.min_gap), fixed3(r.collision_speed),
      fixed3(r.final_time));
  }
}

std::vector<RunRow> parse_csv(std::istream & in)
{
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == kCsvHeader, "missing CSV header");
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    const auto f = split(line, ',');
    require(f.size() == 7, "CSV row must have 7 fields");
    const auto mode = sim::parse_mode(f[2]);
    const auto outcome = sim::parse_outcome(f[3]);
    require(mode.has_value(), "unknown mode in CSV");
    require(outcome.has_value(), "unknown outcome in CSV");
    RunRow row;
    row.key = {*mode, parse_number(f[0]), parse_number(f[1])};
    row.outcome = *outcome;
    row.min_gap = parse_number(f[4]);
    row.collision_speed = parse_number(f[5]);
    row.final_time = parse_number(f[6]);
    row.repetition = !rows.empty() && rows.back().key == row.key ? rows.back().repetition + 1 : 0;
    rows.push_back(row);
  }
  return rows;
}

void emit_phase_grid(const GridReport & report, AgentMode mode, std::ostream & out)
{
  std::set<double> v0s;
  std::set<double> d0s;
  for (const auto & [key, outcome] : report.cells) {
    if (key.mode == mode) {
      v0s.insert(key.v0);
      d0s.insert(key.d0);
    }
  }
  require(!v0s.empty(), "report has no cells for the requested mode");

  static constexpr char kGlyph[] = {'x', 'o', '+'};
  out << fmt::format(
    "{}: x collision, o safe stop, + safe pass, # physically avoidable\n", sim::to_string(mode));
  out << "  v0\\d0";
  for (double d0 : d0s) {
    out << fmt::format("{:>5g}", d0);
  }
  out << '\n';

  bool marker_done = false;
  auto marker = [&] {
    out << fmt::format(
      "  {:-<{}} v_safe_max {:.2f}\n", "", 5 * d0s.size() + 4, report.v_safe_max);
    marker_done = true;
  };
  for (auto it = v0s.rbegin(); it != v0s.rend(); ++it) {
    const double v0 = *it;
    if (!marker_done && v0 <= report.v_safe_max) {
      marker();
    }
    out << fmt::format("{:>7g}", v0);
    for (double d0 : d0s) {
      const auto found = report.cells.find(CellKey{mode, v0, d0});
      const bool feasible = d0 >= v0 * report.max_latency + v0 * v0 / (2.0 * report.max_decel);
      const char glyph = found != report.cells.end() ? kGlyph[static_cast<int>(found->second)] : '?';
      out << fmt::format("   {}{}", glyph, feasible ? '#' : ' ');
    }
    out << '\n';
  }
  if (!marker_done) {
    marker();
  }
}

std::vector<EnvelopeRow> envelope_table(
  const envelope::SafetyPolicy & policy, const envelope::LidarSpec & lidar,
  const envelope::DetectabilityModel & model,
  const std::vector<envelope::WeatherCondition> & weathers)
{
  std::vector<EnvelopeRow> rows;
  for (const auto & w : weathers) {
    auto clear = w;
    clear.sigma_current = w.sigma_clear;
    const double v_clear = envelope::weather_adjusted_safe_velocity(policy, model, lidar, clear);

    EnvelopeRow row;
    row.weather = w.name;
    row.sigma = w.sigma_current;
    row.effective_range = envelope::effective_lidar_range(lidar, w);
    row.detection_range = envelope::max_detection_range(model, lidar, w, policy);
    row.stopping_room = std::max(0.0, row.detection_range - policy.safety_margin);
    row.v_safe = envelope::weather_adjusted_safe_velocity(policy, model, lidar, w);
    row.ratio_to_clear = v_clear > 0.0 ? row.v_safe / v_clear : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void envelope_report(const std::vector<EnvelopeRow> & rows, std::ostream & out)
{
  out << fmt::format(
    "{:<10}{:>10}{:>12}{:>10}{:>10}{:>10}{:>8}\n", "weather", "sigma/km", "range_m", "R_max",
    "D_stop", "v_safe", "ratio");
  for (const auto & r : rows) {
    out << fmt::format(
      "{:<10}{:>10.3f}{:>12.3f}{:>10.3f}{:>10.3f}{:>10.3f}{:>8.3f}\n", r.weather, r.sigma,
      r.effective_range, r.detection_range, r.stopping_room, r.v_safe, r.ratio_to_clear);
  }
}

}  // namespace synergy::harness
