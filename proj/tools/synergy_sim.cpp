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

// Command-line front end: run, grid, envelope, derive-model, attenuation.

#include "synergy/error.hpp"
#include "synergy/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace
{

using namespace synergy;

constexpr int kUsageError = 1;
constexpr int kConfigError = 2;

struct Options
{
  std::string config_path;
  std::string mode;
  std::optional<double> v0;
  std::optional<double> d0;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  int jobs{static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
  std::string format{"csv"};
  double visibility{10.0};
  double wavelength{0.905};
  std::optional<double> sigma;
  double range{100.0};
};

/// --seed wins over SYNERGY_SIM_SEED; the default is 0.
std::uint64_t resolve_seed(const Options & opt)
{
  if (opt.seed) {
    return *opt.seed;
  }
  if (const char * env = std::getenv("SYNERGY_SIM_SEED"); env != nullptr && *env != '\0') {
    char * end = nullptr;
    const auto value = std::strtoull(env, &end, 10);
    if (*end != '\0') {
      throw ConfigError("SYNERGY_SIM_SEED must be a non-negative integer");
    }
    return value;
  }
  return 0;
}

harness::HarnessConfig load(const Options & opt)
{
  auto config = opt.config_path.empty() ? harness::HarnessConfig{} : harness::load_config(opt.config_path);
  if (!opt.mode.empty()) {
    const auto mode = sim::parse_mode(opt.mode);
    if (!mode) {
      throw InvalidInput("unknown mode '" + opt.mode + "'");
    }
    config.scenario.mode = *mode;
    config.grid.modes = {*mode};
  }
  if (opt.v0) {
    config.scenario.v0 = *opt.v0;
    config.grid.v0_values = {*opt.v0};
  }
  if (opt.d0) {
    config.scenario.d0 = *opt.d0;
    config.grid.d0_values = {*opt.d0};
  }
  const auto seed = resolve_seed(opt);
  if (config.scenario.noise) {
    config.scenario.noise->seed = seed;
  }
  if (config.grid.noise) {
    config.grid.noise->seed = seed;
  }
  try {
    sim::validate(config.scenario);
    harness::validate(config.grid);
  } catch (const InvalidInput & e) {
    throw ConfigError(e.what());
  }
  return config;
}

void write(const Options & opt, const std::string & text)
{
  if (opt.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(opt.out_path, std::ios::binary);
  file << text;
  if (!file) {
    throw std::runtime_error("cannot write '" + opt.out_path + "'");
  }
}

void cmd_run(const Options & opt)
{
  const auto config = load(opt);
  const auto record = sim::run_scenario(config.scenario);
  harness::GridReport report;
  report.rows.push_back(harness::RunRow{
    {config.scenario.mode, config.scenario.v0, config.scenario.d0}, 0, record.outcome,
    record.min_gap, record.collision_speed, record.final_time});
  std::ostringstream out;
  harness::emit_csv(report, out);
  write(opt, out.str());
}

void cmd_grid(const Options & opt)
{
  const auto config = load(opt);
  const auto report = harness::run_grid(config.grid, config.scenario, opt.jobs);
  std::ostringstream out;
  if (opt.format == "grid") {
    for (auto mode : config.grid.modes) {
      harness::emit_phase_grid(report, mode, out);
      const auto & within = report.counts_within.count(mode) ? report.counts_within.at(mode)
                                                              : harness::OutcomeCounts{};
      const auto & above = report.counts_above.count(mode) ? report.counts_above.at(mode)
                                                            : harness::OutcomeCounts{};
      out << fmt::format(
        "  v0 <= v_safe_max: {} collision, {} safe stop, {} safe pass\n"
        "  v0 >  v_safe_max: {} collision, {} safe stop, {} safe pass\n\n",
        within[0], within[1], within[2], above[0], above[1], above[2]);
    }
  } else {
    harness::emit_csv(report, out);
  }
  write(opt, out.str());
}

void cmd_envelope(const Options & opt)
{
  const auto config = load(opt);
  const auto & s = config.scenario;
  std::vector<envelope::WeatherCondition> weathers{
    envelope::clear_weather(), envelope::haze_weather(), envelope::fog_weather()};
  const bool listed = std::any_of(weathers.begin(), weathers.end(), [&](const auto & w) {
    return w.sigma_current == s.weather.sigma_current && w.sigma_clear == s.weather.sigma_clear;
  });
  if (!listed) {
    weathers.push_back(s.weather);
  }
  std::ostringstream out;
  harness::envelope_report(harness::envelope_table(s.policy, s.lidar, s.model, weathers), out);
  write(opt, out.str());
}

void cmd_derive(const Options & opt)
{
  const auto config = load(opt);
  lidar::SweepSpec sweep;
  sweep.range_min = config.scenario.lidar.near_blind_range;
  sweep.jobs = opt.jobs;
  const auto derived =
    lidar::derive_detectability_line(config.scenario.lidar, lidar::ClusterParams{}, sweep);
  std::ostringstream out;
  out << "range_m,min_height_m,detectable\n";
  for (const auto & p : derived.frontier) {
    out << fmt::format("{:.3f},{:.4f},{}\n", p.range, p.min_height, p.detectable ? 1 : 0);
  }
  if (derived.model) {
    out << fmt::format(
      "; line: height >= {:.5f} * range + {:.5f}\n", derived.model->slope,
      derived.model->intercept);
  } else {
    out << "; line: none (frontier has no finite upper bound)\n";
  }
  write(opt, out.str());
}

void cmd_attenuation(const Options & opt)
{
  std::ostringstream out;
  const double sigma = opt.sigma.value_or(
    envelope::attenuation_coefficient(opt.visibility, opt.wavelength));
  const double visibility =
    opt.sigma ? envelope::visibility_for_attenuation(sigma, opt.wavelength) : opt.visibility;
  out << fmt::format(
    "visibility_km={:.4f} wavelength_um={:.3f} q={:.4f} sigma_per_km={:.5f} "
    "range_m={:.1f} transmittance={:.6f}\n",
    visibility, opt.wavelength, envelope::kruse_exponent(visibility), sigma, opt.range,
    envelope::transmittance(sigma, opt.range / 1000.0));
  write(opt, out.str());
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Safety-layer scenario simulator"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App * sub) {
    sub->add_option("--config", opt.config_path, "Config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_path, "Write output to this file instead of stdout");
  };
  auto scenario = [&](CLI::App * sub) {
    sub->add_option("--mode", opt.mode, "mission_only, sr, sr_fault_injected or sr_mission_crash");
    sub->add_option("--v0", opt.v0, "Initial speed [m/s]");
    sub->add_option("--d0", opt.d0, "Initial gap to the obstacle [m]");
    sub->add_option("--seed", opt.seed, "Noise seed (overrides SYNERGY_SIM_SEED)");
  };

  auto * run = app.add_subcommand("run", "Run one scenario and print its CSV row");
  common(run);
  scenario(run);

  auto * grid = app.add_subcommand("grid", "Sweep the scenario grid");
  common(grid);
  scenario(grid);
  grid->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
  grid->add_option("--format", opt.format, "csv or grid")->check(CLI::IsMember({"csv", "grid"}));

  auto * env = app.add_subcommand("envelope", "Safe-speed table per weather condition");
  common(env);

  auto * derive = app.add_subcommand("derive-model", "Brute-force detectability line of the LiDAR");
  common(derive);
  derive->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto * att = app.add_subcommand("attenuation", "Kruse attenuation and transmittance");
  att->add_option("--out", opt.out_path, "Write output to this file instead of stdout");
  att->add_option("--visibility", opt.visibility, "Visibility [km]")->check(CLI::PositiveNumber);
  att->add_option("--sigma", opt.sigma, "Attenuation coefficient [1/km]")->check(CLI::PositiveNumber);
  att->add_option("--wavelength", opt.wavelength, "Wavelength [um]")->check(CLI::PositiveNumber);
  att->add_option("--range", opt.range, "Path length [m]")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (run->parsed()) {
      cmd_run(opt);
    } else if (grid->parsed()) {
      cmd_grid(opt);
    } else if (env->parsed()) {
      cmd_envelope(opt);
    } else if (derive->parsed()) {
      cmd_derive(opt);
    } else if (att->parsed()) {
      cmd_attenuation(opt);
    }
  } catch (const ConfigError & e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidInput & e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return 0;
}
