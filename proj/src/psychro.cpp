#include "synthmet/psychro.hpp"

#include <algorithm>
#include <cmath>

#include "synthmet/error.hpp"
#include "synthmet/kernels.hpp"
#include "synthmet/solar.hpp"

namespace synthmet {

namespace {

constexpr double kA = 610.94;
constexpr double kB = 17.625;
constexpr double kC = 243.04;

void check_temperature(double t) {
  if (!(t >= -40.0 && t <= 60.0)) throw PreconditionError("temperature outside [-40, 60] C: " + std::to_string(t));
}

}  // namespace

double saturation_vapor_pressure(double t) {
  check_temperature(t);
  return kA * std::exp(kB * t / (t + kC));
}

double dew_point_from_vapor(double e) {
  if (!(e > 0.0)) throw PreconditionError("dew point needs a positive vapour pressure");
  const double g = std::log(e / kA);
  return kC * g / (kB - g);
}

double humidity_ratio(double e, double pressure) {
  if (!(pressure > e)) throw PreconditionError("pressure must exceed vapour pressure");
  return 0.622 * e / (pressure - e);
}

double vapor_from_ratio(double w, double pressure) { return w * pressure / (0.622 + w); }

double enthalpy(double t, double w) { return 1.006 * t + w * (kLatentHeat + 1.86 * t); }

MoistAirState moist_air_state(double t, double rh, double pressure) {
  if (!(rh >= 0.0 && rh <= 100.0)) throw PreconditionError("relative humidity outside [0, 100]: " + std::to_string(rh));
  MoistAirState s;
  s.t = t;
  s.rh = rh;
  s.pressure = pressure;
  s.vapor_pressure = rh / 100.0 * saturation_vapor_pressure(t);
  s.humidity_ratio = humidity_ratio(s.vapor_pressure, pressure);
  s.dew_point = rh > 0.0 ? dew_point_from_vapor(s.vapor_pressure) : std::nan("");
  s.enthalpy = enthalpy(t, s.humidity_ratio);
  return s;
}

MoistAirState state_from_ratio(double t, double w, double pressure) {
  if (!(w >= 0.0)) throw PreconditionError("humidity ratio must be non-negative");
  MoistAirState s;
  s.t = t;
  s.pressure = pressure;
  s.humidity_ratio = w;
  s.vapor_pressure = vapor_from_ratio(w, pressure);
  s.rh = 100.0 * s.vapor_pressure / saturation_vapor_pressure(t);
  s.dew_point = w > 0.0 ? dew_point_from_vapor(s.vapor_pressure) : std::nan("");
  s.enthalpy = enthalpy(t, w);
  return s;
}

double sky_temperature(double t, double dew_point, double okta) {
  check_temperature(t);
  if (!(dew_point <= t + 1e-9)) throw PreconditionError("dew point above dry-bulb temperature");
  if (!(okta >= 0.0 && okta <= 8.0)) throw PreconditionError("nebulosity outside [0, 8] octas");
  const double d = dew_point / 100.0;
  const double clear = 0.711 + 0.56 * d + 0.73 * d * d;
  const double n = okta / 8.0 * 10.0;
  const double eps = clear * (1.0 + 0.0224 * n - 0.0035 * n * n + 0.00028 * n * n * n);
  const double tsky = std::pow(eps, 0.25) * (t + 273.15) - 273.15;
  return std::min(tsky, t);
}

WeatherSeries extrapolate_site(const WeatherSeries& series, const Site& target, const ExtrapolationOptions& options) {
  target.validate();
  const Site& source = series.site();
  const double dalt = target.altitude - source.altitude;
  if (std::abs(dalt) > 3000.0) throw PreconditionError("altitude difference above 3000 m");
  const bool moved = target.latitude != source.latitude || target.longitude != source.longitude;

  Site out_site = target;
  if (!out_site.pressure && source.pressure) {
    const Site standard_src{source.name, source.latitude, source.longitude, source.altitude, std::nullopt};
    const Site standard_dst{target.name, target.latitude, target.longitude, target.altitude, std::nullopt};
    out_site.pressure = *source.pressure * standard_dst.pressure_pa() / standard_src.pressure_pa();
  }
  WeatherSeries out = series;
  out.set_site(out_site);
  if (dalt == 0.0 && !moved) return out;

  if (dalt != 0.0 && series.has(Variable::temp)) {
    const auto src_t = series.column(Variable::temp);
    std::vector<double> t(src_t.begin(), src_t.end());
    for (double& v : t)
      if (!is_missing(v)) v = std::clamp(v - options.lapse_rate * dalt / 1000.0, -40.0, 60.0);
    if (series.has(Variable::rh)) {
      const auto src_rh = series.column(Variable::rh);
      std::vector<double> rh(src_rh.begin(), src_rh.end());
      for (std::size_t i = 0; i < rh.size(); ++i) {
        if (is_missing(rh[i]) || is_missing(src_t[i])) continue;
        const double e = rh[i] / 100.0 * saturation_vapor_pressure(std::clamp(src_t[i], -40.0, 60.0));
        rh[i] = std::min(100.0, 100.0 * e / saturation_vapor_pressure(t[i]));
      }
      out.set_column(Variable::rh, std::move(rh));
    }
    out.set_column(Variable::temp, std::move(t));
  }

  if (moved && series.has(Variable::ghi)) {
    const auto ghi = series.column(Variable::ghi);
    std::vector<double> new_ghi(series.size(), kMissing);
    std::vector<double> new_dhi(series.size(), kMissing);
    std::vector<double> new_bni(series.size(), kMissing);
    const bool has_dhi = series.has(Variable::dhi);
    const Variable ghi_only[] = {Variable::ghi};
    for (const DayBlock& d : complete_days(series, ghi_only)) {
      const int doy = day_of_year(d.day);
      const auto src_geo = solar_geometry(source, doy);
      const auto dst_geo = solar_geometry(target, doy);
      double total = 0.0;
      for (std::size_t h = 0; h < 24; ++h) total += ghi[d.first + h];
      const double kt = src_geo.h0_daily > 0.0 ? clearness_index(total, src_geo.h0_daily).kt : 0.0;
      const auto profile = hourly_profile(kt, dst_geo);
      double kd = kMissing;
      if (has_dhi) {
        const auto dhi = series.column(Variable::dhi);
        double dsum = 0.0;
        for (std::size_t h = 0; h < 24; ++h) dsum += dhi[d.first + h];
        kd = total > 0.0 ? std::clamp(dsum / total, 0.0, 1.0) : 1.0;
      }
      for (std::size_t h = 0; h < 24; ++h) {
        new_ghi[d.first + h] = profile[h];
        if (!is_missing(kd)) {
          new_dhi[d.first + h] = kd * profile[h];
          new_bni[d.first + h] = beam_normal(profile[h], kd * profile[h], mean_cos_zenith(dst_geo, static_cast<int>(h)));
        }
      }
    }
    out.set_column(Variable::ghi, std::move(new_ghi));
    if (has_dhi) out.set_column(Variable::dhi, std::move(new_dhi));
    if (has_dhi)
      out.set_column(Variable::bni, std::move(new_bni));
    else
      out.remove_column(Variable::bni);
  }
  return out;
}

std::vector<ExtraColumn> derived_columns(const WeatherSeries& series) {
  if (!series.has(Variable::temp) || !series.has(Variable::rh))
    throw PreconditionError("derived psychrometrics need temperature and relative humidity");
  const auto t = series.column(Variable::temp);
  const auto rh = series.column(Variable::rh);
  const auto cols = parallel::psychro_columns(t, rh, series.site().pressure_pa());
  std::vector<double> tsky(series.size(), kMissing);
  const bool has_okta = series.has(Variable::okta);
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (is_missing(cols.dew_point[i])) continue;
    const double okta = has_okta ? series.column(Variable::okta)[i] : 0.0;
    if (is_missing(okta)) continue;
    tsky[i] = sky_temperature(t[i], std::min(cols.dew_point[i], t[i]), okta);
  }
  return {{"tdew_C", cols.dew_point},
          {"e_Pa", cols.vapor_pressure},
          {"w_kgkg", cols.humidity_ratio},
          {"h_kJkg", cols.enthalpy},
          {"tsky_C", std::move(tsky)}};
}

}  // namespace synthmet
