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

#include "synergy/envelope.hpp"

#include "synergy/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace synergy::envelope
{

using detail::require;

void validate(const DetectabilityModel & model)
{
  require(std::isfinite(model.slope) && model.slope > 0.0, "detectability slope must be > 0");
  require(std::isfinite(model.intercept), "detectability intercept must be finite");
}

void validate(const LidarSpec & lidar)
{
  require(!lidar.beam_elevations.empty(), "lidar needs at least one beam");
  for (std::size_t i = 1; i < lidar.beam_elevations.size(); ++i) {
    require(
      lidar.beam_elevations[i] > lidar.beam_elevations[i - 1],
      "beam elevations must be strictly increasing");
  }
  require(lidar.horizontal_resolution > 0.0, "horizontal resolution must be > 0");
  require(lidar.mount_height > 0.0, "mount height must be > 0");
  require(lidar.max_range_clear > 0.0, "clear-weather max range must be > 0");
  require(lidar.wavelength > 0.0, "wavelength must be > 0");
  require(lidar.near_blind_range >= 0.0, "near blind range must be >= 0");
}

void validate(const WeatherCondition & weather)
{
  require(weather.visibility > 0.0, "visibility must be > 0");
  require(weather.sigma_clear > 0.0, "sigma_clear must be > 0");
  require(
    weather.sigma_current >= weather.sigma_clear, "sigma_current must be >= sigma_clear");
}

void validate(const SafetyPolicy & policy)
{
  require(policy.min_obstacle_height > 0.0, "min obstacle height must be > 0");
  require(policy.safety_margin >= 0.0, "safety margin must be >= 0");
  require(policy.max_decel > 0.0, "max deceleration must be > 0");
  require(policy.max_latency >= 0.0, "max latency must be >= 0");
}

double guaranteed_detection_range(const DetectabilityModel & model, double height)
{
  require(height > 0.0, "obstacle height must be > 0");
  validate(model);
  return std::max(0.0, (height - model.intercept) / model.slope);
}

double kruse_exponent(double visibility_km)
{
  require(visibility_km > 0.0, "visibility must be > 0");
  if (visibility_km >= 50.0) {
    return 1.6;
  }
  if (visibility_km >= 6.0) {
    return 1.3;
  }
  if (visibility_km >= 1.0) {
    return 0.16 * visibility_km + 0.34;
  }
  if (visibility_km >= 0.5) {
    return visibility_km - 0.5;
  }
  return 0.0;
}

double attenuation_coefficient(double visibility_km, double wavelength_um)
{
  require(wavelength_um > 0.0, "wavelength must be > 0");
  const double q = kruse_exponent(visibility_km);
  return (17.35 / visibility_km) * std::pow(wavelength_um / 0.55, -q);
}

double visibility_for_attenuation(double sigma_per_km, double wavelength_um)
{
  require(sigma_per_km > 0.0, "attenuation coefficient must be > 0");
  // sigma(V) is decreasing in V on every branch for wavelengths above 0.55 um,
  // so the bracket search below is well defined there.
  double lo = 1e-4;
  double hi = 1e4;
  if (attenuation_coefficient(lo, wavelength_um) < sigma_per_km) {
    return lo;
  }
  if (attenuation_coefficient(hi, wavelength_um) >= sigma_per_km) {
    return hi;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (attenuation_coefficient(mid, wavelength_um) >= sigma_per_km) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double transmittance(double sigma_per_km, double range_km)
{
  require(sigma_per_km >= 0.0, "attenuation coefficient must be >= 0");
  require(range_km >= 0.0, "range must be >= 0");
  return std::exp(-sigma_per_km * range_km);
}

double effective_lidar_range(const LidarSpec & lidar, const WeatherCondition & weather)
{
  require(weather.sigma_current > 0.0, "sigma_current must be > 0");
  validate(weather);
  require(lidar.max_range_clear > 0.0, "clear-weather max range must be > 0");
  // Same minimum detectable power in every weather: sigma_clear * R_clear == sigma_now * R_now.
  return (weather.sigma_clear / weather.sigma_current) * lidar.max_range_clear;
}

double max_detection_range(
  const DetectabilityModel & model, const LidarSpec & lidar, const WeatherCondition & weather,
  const SafetyPolicy & policy)
{
  validate(policy);
  return std::min(
    guaranteed_detection_range(model, policy.min_obstacle_height),
    effective_lidar_range(lidar, weather));
}

double max_safe_velocity(const SafetyPolicy & policy, double detection_range)
{
  require(detection_range >= 0.0, "detection range must be >= 0");
  validate(policy);
  const double stop_room = detection_range - policy.safety_margin;
  if (stop_room <= 0.0) {
    return 0.0;
  }
  const double a = policy.max_decel;
  const double a_l = a * policy.max_latency;
  return std::max(0.0, -a_l + std::sqrt(a_l * a_l + 2.0 * a * stop_room));
}

double weather_adjusted_safe_velocity(
  const SafetyPolicy & policy, const DetectabilityModel & model, const LidarSpec & lidar,
  const WeatherCondition & weather)
{
  return max_safe_velocity(policy, max_detection_range(model, lidar, weather, policy));
}

double stopping_distance(double velocity, const SafetyPolicy & policy)
{
  require(velocity >= 0.0, "velocity must be >= 0");
  validate(policy);
  return velocity * policy.max_latency + velocity * velocity / (2.0 * policy.max_decel) +
         policy.safety_margin;
}

WeatherCondition weather_from_sigma(
  std::string name, double sigma_current, double sigma_clear, double wavelength_um)
{
  WeatherCondition w;
  w.name = std::move(name);
  w.sigma_clear = sigma_clear;
  w.sigma_current = sigma_current;
  w.visibility = visibility_for_attenuation(sigma_current, wavelength_um);
  validate(w);
  return w;
}

WeatherCondition clear_weather() { return weather_from_sigma("clear", 0.1); }
WeatherCondition haze_weather() { return weather_from_sigma("haze", 1.0); }
WeatherCondition fog_weather() { return weather_from_sigma("fog", 10.0); }

}  // namespace synergy::envelope
