#include "synthmet/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "synthmet/error.hpp"

namespace synthmet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double deg2rad(double d) { return d * kPi / 180.0; }

// Clips clock hour [h, h+1) to the daylight hour-angle interval.
std::pair<double, double> daylight_interval(const SolarGeometry& g, int hour) {
  const double ws = g.sunset_hour_angle;
  const double w1 = std::max(g.hour_angle(hour), -ws);
  const double w2 = std::min(g.hour_angle(hour + 1), ws);
  return {w1, w2};
}

// Antiderivative of (a + b cos w)(cos w - cos ws) in w.
double cpr_primitive(double w, double a, double b, double cws) {
  return a * std::sin(w) - a * cws * w + b * (0.5 * w + 0.25 * std::sin(2.0 * w)) - b * cws * std::sin(w);
}

}  // namespace

double SolarGeometry::hour_angle(double clock_hour) const {
  return (clock_hour + solar_time_offset - 12.0) * kPi / 12.0;
}

double declination_deg(int n) { return 23.45 * std::sin(deg2rad(360.0 * (284.0 + n) / 365.0)); }

SolarGeometry solar_geometry(const Site& site, int n) {
  if (n < 1 || n > 366) throw PreconditionError("day of year outside [1, 366]");
  SolarGeometry g;
  g.day_of_year = n;
  g.latitude = site.latitude;
  g.declination = declination_deg(n);
  g.eccentricity = 1.0 + 0.033 * std::cos(deg2rad(360.0 * n / 365.0));
  g.solar_time_offset = (site.longitude - 15.0 * std::round(site.longitude / 15.0)) / 15.0;

  const double phi = deg2rad(site.latitude), delta = deg2rad(g.declination);
  const double x = std::clamp(-std::tan(phi) * std::tan(delta), -1.0, 1.0);
  g.sunset_hour_angle = std::acos(x);
  g.day_length = 24.0 * g.sunset_hour_angle / kPi;

  const double ws = g.sunset_hour_angle;
  const double cc = std::cos(phi) * std::cos(delta), ss = std::sin(phi) * std::sin(delta);
  const double scale = 12.0 / kPi * kSolarConstant * g.eccentricity;  // Wh per radian of hour angle
  g.h0_daily = std::max(0.0, 2.0 * scale * (cc * std::sin(ws) + ws * ss));
  for (int h = 0; h < 24; ++h) {
    const auto [w1, w2] = daylight_interval(g, h);
    g.h0_hourly[h] = w2 > w1 ? std::max(0.0, scale * (cc * (std::sin(w2) - std::sin(w1)) + (w2 - w1) * ss)) : 0.0;
  }
  return g;
}

ClearnessIndex clearness_index(double ghi_daily, double h0_daily) {
  if (!(h0_daily > 0.0)) throw PreconditionError("clearness index undefined: extraterrestrial radiation is zero");
  const double kt = ghi_daily / h0_daily;
  ClearnessIndex out;
  out.kt = std::clamp(kt, 0.0, 1.0);
  out.clamped = out.kt != kt;
  return out;
}

std::array<double, 24> hourly_ratio(const SolarGeometry& g) {
  std::array<double, 24> r{};
  const double ws = g.sunset_hour_angle;
  if (ws <= 0.0) return r;
  const double s = std::sin(ws - deg2rad(60.0));
  const double a = 0.409 + 0.5016 * s, b = 0.6609 - 0.4767 * s, cws = std::cos(ws);
  double total = 0.0;
  for (int h = 0; h < 24; ++h) {
    const auto [w1, w2] = daylight_interval(g, h);
    if (w2 <= w1) continue;
    r[h] = std::max(0.0, cpr_primitive(w2, a, b, cws) - cpr_primitive(w1, a, b, cws));
    total += r[h];
  }
  if (total > 0.0)
    for (double& x : r) x /= total;
  return r;
}

std::array<double, 24> hourly_profile(double kt_daily, const SolarGeometry& g) {
  if (!(kt_daily >= 0.0 && kt_daily <= 1.0)) throw PreconditionError("daily kt outside [0, 1]");
  auto r = hourly_ratio(g);
  const double day_total = kt_daily * g.h0_daily;
  for (double& x : r) x *= day_total;
  return r;
}

double mean_cos_zenith(const SolarGeometry& g, int hour) {
  return g.h0_hourly[hour] / (kSolarConstant * g.eccentricity);
}

DailyKt daily_kt(const WeatherSeries& series) {
  if (!series.has(Variable::ghi)) throw DataError("series has no global radiation column");
  DailyKt out;
  const auto days = whole_days(series);
  if (days.empty()) return out;
  const auto ghi = series.column(Variable::ghi);
  const HourStamp first = days.front().day;
  const HourStamp last = days.back().day;
  out.days.reserve(static_cast<std::size_t>((last - first) / 24 + 1));
  for (HourStamp d = first; d <= last; d += 24) out.days.push_back(d);
  out.kt.assign(out.days.size(), kMissing);
  for (const DayBlock& b : days) {
    double total = 0.0;
    bool complete = true;
    for (std::size_t h = 0; h < 24; ++h) {
      if (is_missing(ghi[b.first + h])) complete = false;
      total += ghi[b.first + h];
    }
    const auto g = solar_geometry(series.site(), day_of_year(b.day));
    if (!complete || g.h0_daily <= 0.0) continue;
    const auto ci = clearness_index(total, g.h0_daily);
    out.clamped += ci.clamped ? 1 : 0;
    out.kt[static_cast<std::size_t>((b.day - first) / 24)] = ci.kt;
  }
  return out;
}

double beam_normal(double ghi, double dhi, double cosz) {
  if (cosz < 0.0175) return 0.0;
  return std::clamp((ghi - dhi) / cosz, 0.0, 1500.0);
}

}  // namespace synthmet
