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
 * @file harness.hpp
 * @brief Scenario grid sweeps, worst-case aggregation, CSV and phase-grid
 *        emission, safe-speed tables and config file ingestion.
 */

#ifndef SYNERGY__HARNESS_HPP_
#define SYNERGY__HARNESS_HPP_

#include "synergy/vehicle_sim.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace synergy::harness
{

using sim::AgentMode;
using sim::Outcome;

struct GridSpec
{
  std::vector<double> v0_values;
  std::vector<double> d0_values;
  std::vector<AgentMode> modes;
  int repetitions{1};
  std::optional<sim::NoiseSpec> noise;  ///< seed is the base seed for every cell
};

/// v0 in {5..40} step 5, d0 in {10..100} step 10, all four modes, noise off.
GridSpec evaluation_grid();
void validate(const GridSpec & grid);

struct CellKey
{
  AgentMode mode{AgentMode::sr};
  double v0{0.0};
  double d0{0.0};

  auto operator<=>(const CellKey &) const = default;
};

struct RunRow
{
  CellKey key;
  int repetition{0};
  Outcome outcome{Outcome::safe_stop};
  double min_gap{0.0};
  double collision_speed{0.0};
  double final_time{0.0};
};

/// Per-outcome tallies indexed by Outcome.
using OutcomeCounts = std::array<int, 3>;

struct GridReport
{
  std::map<CellKey, Outcome> cells;  ///< worst case over repetitions
  std::vector<RunRow> rows;          ///< sorted by (mode, v0, d0, repetition)
  std::map<AgentMode, OutcomeCounts> counts_within;  ///< v0 <= v_safe_max
  std::map<AgentMode, OutcomeCounts> counts_above;   ///< v0 > v_safe_max
  double v_safe_max{0.0};
  double max_decel{7.5};
  double max_latency{0.01};  ///< [s] counted in the feasibility marker
};

/// collision > safe_stop > safe_pass.
Outcome worse(Outcome a, Outcome b);

/// Seed of one noisy repetition, a pure function of its inputs.
std::uint64_t cell_seed(std::uint64_t base, const CellKey & key, int repetition);

/// Builds the config of every cell from @p base, rejects the whole grid if any
/// is invalid, then runs the cells on up to @p jobs threads. Output does not
/// depend on @p jobs.
GridReport run_grid(const GridSpec & grid, const sim::ScenarioConfig & base, int jobs = 1);

void emit_csv(const GridReport & report, std::ostream & out);
/// Inverse of emit_csv. Throws InvalidInput on malformed input.
std::vector<RunRow> parse_csv(std::istream & in);

/// Rows are v0 descending, columns d0 ascending. Each cell is an outcome glyph
/// (x collision, o safe stop, + safe pass) followed by '#' where stopping from
/// v0 within d0 is physically possible. Throws InvalidInput if the report has
/// no cells for @p mode.
void emit_phase_grid(const GridReport & report, AgentMode mode, std::ostream & out);

struct EnvelopeRow
{
  std::string weather;
  double sigma{0.0};            ///< [1/km]
  double effective_range{0.0};  ///< [m]
  double detection_range{0.0};  ///< [m]
  double stopping_room{0.0};    ///< [m]
  double v_safe{0.0};           ///< [m/s]
  double ratio_to_clear{0.0};
};

std::vector<EnvelopeRow> envelope_table(
  const envelope::SafetyPolicy & policy, const envelope::LidarSpec & lidar,
  const envelope::DetectabilityModel & model,
  const std::vector<envelope::WeatherCondition> & weathers);
void envelope_report(const std::vector<EnvelopeRow> & rows, std::ostream & out);

struct HarnessConfig
{
  sim::ScenarioConfig scenario;
  GridSpec grid{evaluation_grid()};
};

/// INI-style text: sections [scenario], [lidar], [weather], [policy], [grid];
/// `key = value`; `;` starts a comment. Unknown sections or keys, malformed
/// values and invalid resulting configs raise ConfigError.
HarnessConfig parse_config(std::istream & in);
HarnessConfig load_config(const std::string & path);

}  // namespace synergy::harness

#endif  // SYNERGY__HARNESS_HPP_
