#pragma once

#include <vector>

#include "synthmet/weather.hpp"

namespace synthmet {

inline constexpr double kStandardPressure = 101325.0;  // Pa
inline constexpr double kLatentHeat = 2501.0;          // kJ/kg at 0 C

/// Magnus form, T in [-40, 60] C.
double saturation_vapor_pressure(double t);
/// Closed-form Magnus inversion; e > 0.
double dew_point_from_vapor(double e);
double humidity_ratio(double e, double pressure);
double vapor_from_ratio(double w, double pressure);
/// kJ per kg of dry air.
double enthalpy(double t, double w);

struct MoistAirState {
  double t = 0.0;
  double rh = 0.0;
  double pressure = kStandardPressure;
  double vapor_pressure = 0.0;
  double humidity_ratio = 0.0;
  double dew_point = 0.0;  // NaN when rh = 0
  double enthalpy = 0.0;

  bool has_dew_point() const { return !std::isnan(dew_point); }
};

MoistAirState moist_air_state(double t, double rh, double pressure = kStandardPressure);
/// State from dry-bulb and humidity ratio; RH may exceed 100 for supersaturated input.
MoistAirState state_from_ratio(double t, double w, double pressure = kStandardPressure);

/// Berdahl-Martin clear-sky emissivity with a cloud-cover polynomial; clamped to <= t.
double sky_temperature(double t, double dew_point, double okta);

struct ExtrapolationOptions {
  double lapse_rate = 6.5;  // K per km
};

/// Moves a series to another site: temperature lapse, barometric pressure,
/// vapour pressure kept (RH capped at 100), daily kt and kd kept with the
/// solar geometry of the target.
WeatherSeries extrapolate_site(const WeatherSeries& series, const Site& target, const ExtrapolationOptions& options = {});

/// tdew_C, e_Pa, w_kgkg, h_kJkg, tsky_C for every hour (missing where inputs are).
/// Sky temperature assumes a clear sky when the series has no nebulosity.
std::vector<ExtraColumn> derived_columns(const WeatherSeries& series);

}  // namespace synthmet
