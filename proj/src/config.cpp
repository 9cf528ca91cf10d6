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

#include "synergy/error.hpp"
#include "synergy/harness.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace synergy::harness
{

namespace
{

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string & message) { throw ConfigError(message); }

std::string trim(const std::string & s)
{
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) {
    return {};
  }
  return s.substr(begin, s.find_last_not_of(" \t") - begin + 1);
}

double to_double(const std::string & text)
{
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    fail("expected a number, got '" + text + "'");
  }
  return value;
}

int to_int(const std::string & text)
{
  const std::string t = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    fail("expected an integer, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string & text)
{
  const std::string t = trim(text);
  if (t == "true" || t == "1") {
    return true;
  }
  if (t == "false" || t == "0") {
    return false;
  }
  fail("expected true or false, got '" + text + "'");
}

std::vector<std::string> to_list(const std::string & text)
{
  std::vector<std::string> items;
  std::size_t begin = 0;
  while (true) {
    const auto pos = text.find(',', begin);
    items.push_back(trim(text.substr(begin, pos - begin)));
    if (pos == std::string::npos) {
      break;
    }
    begin = pos + 1;
  }
  return items;
}

std::vector<double> to_doubles(const std::string & text)
{
  std::vector<double> out;
  for (const auto & item : to_list(text)) {
    out.push_back(to_double(item));
  }
  return out;
}

AgentMode to_mode(const std::string & text)
{
  const auto mode = sim::parse_mode(trim(text));
  if (!mode) {
    fail("unknown mode '" + text + "'");
  }
  return *mode;
}

using Setter = std::function<void(const std::string &)>;

/// Geometry keys rebuild the beam fan, so they are collected first.
struct LidarGeometry
{
  int beams{32};
  double elevation_min{-15.5};
  double elevation_max{9.3};
  double mount_height{1.8};
  double horizontal_resolution{0.4};
  bool custom{false};
};

struct Builder
{
  HarnessConfig config;
  LidarGeometry geometry;
  std::optional<std::string> preset;
  std::optional<double> max_range;
  std::optional<double> near_blind_range;
  std::optional<double> wavelength;
  std::optional<double> visibility;
  std::optional<double> sigma_current;
  std::optional<double> sigma_clear;
  std::optional<std::string> weather_name;
  std::optional<double> noise_sigma;
  std::optional<double> grid_noise_sigma;

  std::map<std::string, std::map<std::string, Setter>> table()
  {
    auto & s = config.scenario;
    auto num = [](double & field) {
      return [&field](const std::string & v) { field = to_double(v); };
    };
    auto opt = [](std::optional<double> & field) {
      return [&field](const std::string & v) { field = to_double(v); };
    };
    auto geo = [this](auto & field) {
      return [this, &field](const std::string & v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(field)>, int>) {
          field = to_int(v);
        } else {
          field = to_double(v);
        }
        geometry.custom = true;
      };
    };
    return {
      {"scenario",
       {{"v0", num(s.v0)},
        {"d0", num(s.d0)},
        {"mode", [&s](const std::string & v) { s.mode = to_mode(v); }},
        {"dt", num(s.dt)},
        {"t_max", num(s.t_max)},
        {"lanes", [&s](const std::string & v) { s.road.lanes = to_int(v); }},
        {"lane_width", num(s.road.lane_width)},
        {"obstacle_height", num(s.obstacle.height)},
        {"obstacle_width", num(s.obstacle.width)},
        {"obstacle_length", num(s.obstacle.length)},
        {"obstacle_lateral_offset", num(s.obstacle.lateral_offset)},
        {"obstacle_velocity", num(s.obstacle.velocity)},
        {"ego_length", num(s.ego_length)},
        {"ego_width", num(s.ego_width)},
        {"clear_margin", num(s.clear_margin)},
        {"stop_hold", num(s.stop_hold)},
        {"hint_recovery", [&s](const std::string & v) { s.hint_recovery = to_bool(v); }},
        {"noise_sigma", opt(noise_sigma)}}},
      {"lidar",
       {{"preset", [this](const std::string & v) { preset = trim(v); }},
        {"beams", geo(geometry.beams)},
        {"elevation_min", geo(geometry.elevation_min)},
        {"elevation_max", geo(geometry.elevation_max)},
        {"mount_height", geo(geometry.mount_height)},
        {"horizontal_resolution", geo(geometry.horizontal_resolution)},
        {"max_range", opt(max_range)},
        {"near_blind_range", opt(near_blind_range)},
        {"wavelength", opt(wavelength)},
        {"detect_slope", num(s.model.slope)},
        {"detect_intercept", num(s.model.intercept)}}},
      {"weather",
       {{"name", [this](const std::string & v) { weather_name = trim(v); }},
        {"visibility", opt(visibility)},
        {"sigma_current", opt(sigma_current)},
        {"sigma_clear", opt(sigma_clear)}}},
      {"policy",
       {{"min_obstacle_height", num(s.policy.min_obstacle_height)},
        {"safety_margin", num(s.policy.safety_margin)},
        {"max_decel", num(s.policy.max_decel)},
        {"max_latency", num(s.policy.max_latency)},
        {"comfort_decel", num(s.planner.comfort_decel)}}},
      {"grid",
       {{"v0", [this](const std::string & v) { config.grid.v0_values = to_doubles(v); }},
        {"d0", [this](const std::string & v) { config.grid.d0_values = to_doubles(v); }},
        {"modes",
         [this](const std::string & v) {
           config.grid.modes.clear();
           for (const auto & m : to_list(v)) {
             config.grid.modes.push_back(to_mode(m));
           }
         }},
        {"repetitions", [this](const std::string & v) { config.grid.repetitions = to_int(v); }},
        {"noise_sigma", opt(grid_noise_sigma)}}},
    };
  }

  void finish()
  {
    auto & s = config.scenario;
    if (preset && *preset != "default") {
      fail("unknown lidar preset '" + *preset + "'");
    }
    s.lidar_preset = preset.value_or("default");
    if (geometry.custom) {
      s.lidar = lidar::uniform_lidar(
        geometry.beams, geometry.elevation_min, geometry.elevation_max, geometry.mount_height,
        s.lidar.max_range_clear, geometry.horizontal_resolution, s.lidar.near_blind_range);
    }
    if (max_range) {
      s.lidar.max_range_clear = *max_range;
    }
    if (near_blind_range) {
      s.lidar.near_blind_range = *near_blind_range;
    }
    if (wavelength) {
      s.lidar.wavelength = *wavelength;
    }

    if (visibility && sigma_current) {
      fail("[weather] takes either visibility or sigma_current, not both");
    }
    double current = s.weather.sigma_current;
    if (visibility) {
      current = envelope::attenuation_coefficient(*visibility, s.lidar.wavelength);
    } else if (sigma_current) {
      current = *sigma_current;
    }
    s.weather = envelope::weather_from_sigma(
      weather_name.value_or(s.weather.name), current, sigma_clear.value_or(s.weather.sigma_clear),
      s.lidar.wavelength);
    if (visibility) {
      s.weather.visibility = *visibility;
    }

    if (noise_sigma && *noise_sigma > 0.0) {
      s.noise = sim::NoiseSpec{0, *noise_sigma};
    }
    if (grid_noise_sigma && *grid_noise_sigma > 0.0) {
      config.grid.noise = sim::NoiseSpec{0, *grid_noise_sigma};
    }
  }
};

}  // namespace

HarnessConfig parse_config(std::istream & in)
{
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error & e) {
    fail(std::string("config syntax: ") + e.what());
  }

  Builder builder;
  const auto table = builder.table();
  try {
    for (const auto & [section, body] : tree) {
      const auto known = table.find(section);
      if (known == table.end() || body.empty()) {
        fail(body.empty() ? "key '" + section + "' outside a section" : "unknown section [" + section + "]");
      }
      for (const auto & [key, value] : body) {
        const auto setter = known->second.find(key);
        if (setter == known->second.end()) {
          fail("unknown key '" + key + "' in [" + section + "]");
        }
        try {
          setter->second(value.data());
        } catch (const ConfigError & e) {
          fail("[" + section + "] " + key + ": " + e.what());
        }
      }
    }
    builder.finish();
    sim::validate(builder.config.scenario);
    validate(builder.config.grid);
  } catch (const InvalidInput & e) {
    fail(std::string("invalid config: ") + e.what());
  }
  return builder.config;
}

HarnessConfig load_config(const std::string & path)
{
  std::ifstream file(path);
  if (!file) {
    fail("cannot open config file '" + path + "'");
  }
  return parse_config(file);
}

}  // namespace synergy::harness
