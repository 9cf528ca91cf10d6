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
 * @file envelope.hpp
 * @brief Safety envelope math: detectability guarantee, weather-degraded
 *        LiDAR range, stopping distance and maximum safe velocity.
 *
 * Units: every public function takes SI meters / seconds, except the
 * atmospheric attenuation helpers which follow the Kruse convention of
 * visibility in kilometers, wavelength in micrometers and attenuation
 * coefficients in 1/km.
 */

#ifndef SYNERGY__ENVELOPE_HPP_
#define SYNERGY__ENVELOPE_HPP_

#include <string>
#include <vector>

namespace synergy::envelope
{

/**
 * @brief Linear detectability guarantee.
 *
 * An obstacle of height y [m] at range x [m] is always detected when
 * y >= slope * x + intercept.
 */
struct DetectabilityModel
{
  double slope{0.0};      ///< height per meter of range
  double intercept{0.0};  ///< [m], may be negative
};

/// Guarantee line for the simulator's default 32-beam LiDAR with the
/// two-row / two-column clustering detector.
inline constexpr DetectabilityModel kDefaultDetectability{0.037, -0.034};

struct LidarSpec
{
  std::vector<double> beam_elevations;  ///< [rad], strictly increasing
  double horizontal_resolution{0.0};    ///< [rad]
  double mount_height{0.0};             ///< [m] above the ground plane
  double max_range_clear{0.0};          ///< [m] clear-weather sensor range
  double wavelength{0.905};             ///< [um]
  double near_blind_range{0.0};         ///< [m] covered by proximity sensors
};

/// Attenuation state of the air. Coefficients are in 1/km.
struct WeatherCondition
{
  std::string name{"clear"};
  double visibility{0.0};     ///< [km]
  double sigma_clear{0.1};    ///< [1/km]
  double sigma_current{0.1};  ///< [1/km]
};

struct SafetyPolicy
{
  double min_obstacle_height{0.75};  ///< [m]
  double safety_margin{0.1};         ///< [m]
  double max_decel{7.5};             ///< [m/s^2], positive magnitude
  double max_latency{0.01};          ///< [s] sensor-to-actuation delay
};

// Invariant checks; each throws synergy::InvalidInput on violation.
void validate(const DetectabilityModel & model);
void validate(const LidarSpec & lidar);
void validate(const WeatherCondition & weather);
void validate(const SafetyPolicy & policy);

/// Range up to which an obstacle of @p height is guaranteed detected, clamped at 0.
double guaranteed_detection_range(const DetectabilityModel & model, double height);

/// Kruse size-distribution exponent q for a visibility in km. Ties at the
/// 50 / 6 / 1 / 0.5 km breakpoints go to the higher-visibility branch.
double kruse_exponent(double visibility_km);

/// Kruse attenuation coefficient [1/km].
double attenuation_coefficient(double visibility_km, double wavelength_um);

/// Inverse of attenuation_coefficient by bisection on visibility. Returns the
/// largest visibility whose coefficient is >= @p sigma_per_km.
double visibility_for_attenuation(double sigma_per_km, double wavelength_um);

/// Beer-Lambert power fraction e^(-sigma * R).
double transmittance(double sigma_per_km, double range_km);

/// LiDAR range under the current weather: (sigma_clear / sigma_current) * R_clear.
double effective_lidar_range(const LidarSpec & lidar, const WeatherCondition & weather);

/// min(guaranteed range of the policy's minimum obstacle height, effective LiDAR range).
double max_detection_range(
  const DetectabilityModel & model, const LidarSpec & lidar, const WeatherCondition & weather,
  const SafetyPolicy & policy);

/// Largest speed that can brake to a stop, after the policy latency, within
/// detection_range - safety_margin. Zero when there is no stopping room.
double max_safe_velocity(const SafetyPolicy & policy, double detection_range);

double weather_adjusted_safe_velocity(
  const SafetyPolicy & policy, const DetectabilityModel & model, const LidarSpec & lidar,
  const WeatherCondition & weather);

/// v * L + v^2 / (2 a) + safety_margin.
double stopping_distance(double velocity, const SafetyPolicy & policy);

// Representative coefficients: 0.1 /km clear air, 1 /km haze, 10 /km fog.
WeatherCondition clear_weather();
WeatherCondition haze_weather();
WeatherCondition fog_weather();
WeatherCondition weather_from_sigma(std::string name, double sigma_current, double sigma_clear = 0.1,
                                    double wavelength_um = 0.905);

}  // namespace synergy::envelope

#endif  // SYNERGY__ENVELOPE_HPP_
