#pragma once

#include <array>
#include <vector>

#include "synthmet/weather.hpp"

namespace synthmet {

inline constexpr double kSolarConstant = 1367.0;  // W/m2

struct SolarGeometry {
  int day_of_year = 1;
  double latitude = 0.0;          // degrees
  double declination = 0.0;       // degrees
  double sunset_hour_angle = 0.0; // radians
  double day_length = 0.0;        // hours
  double eccentricity = 1.0;      // E0 = 1 + 0.033 cos(2 pi n / 365)
  double solar_time_offset = 0.0; // solar time minus local standard time, hours
  double h0_daily = 0.0;          // Wh/m2/day on a horizontal plane
  std::array<double, 24> h0_hourly{};  // Wh/m2 for hour [h, h+1) local standard time

  /// Hour angle (radians) at a local-standard-time clock hour (fractional).
  double hour_angle(double clock_hour) const;
};

double declination_deg(int day_of_year);
SolarGeometry solar_geometry(const Site& site, int day_of_year);

struct ClearnessIndex {
  double kt = 0.0;
  bool clamped = false;
};

/// kt = ghi / H0 clamped to [0, 1]; throws PreconditionError when H0 <= 0 (polar night).
ClearnessIndex clearness_index(double ghi_daily, double h0_daily);

/// Collares-Pereira & Rabl hourly-to-daily ratio integrated over each clock hour,
/// normalised to sum to one over the day.
std::array<double, 24> hourly_ratio(const SolarGeometry& geometry);

/// Daily-to-hourly disaggregation: hourly GHI summing to kt * H0.
std::array<double, 24> hourly_profile(double kt_daily, const SolarGeometry& geometry);

/// Mean cosine of the zenith angle over clock hour h (0 when the sun is down).
double mean_cos_zenith(const SolarGeometry& geometry, int hour);

/// Daily clearness index for every calendar day from the first to the last
/// whole day of a series; NaN where GHI is incomplete or H0 is zero.
struct DailyKt {
  std::vector<HourStamp> days;
  std::vector<double> kt;
  std::size_t clamped = 0;
};
DailyKt daily_kt(const WeatherSeries& series);

/// Hourly beam normal from global and diffuse horizontal, 0 below 1 degree of mean elevation.
double beam_normal(double ghi, double dhi, double mean_cos_zenith);

}  // namespace synthmet
