#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <unistd.h>

#include "synthmet/correlation.hpp"
#include "synthmet/laws.hpp"
#include "synthmet/solar.hpp"

namespace synthmet::fixtures {

Site coastal_site() { return {"coastal", -20.9, 55.5, 8.0, std::nullopt}; }

WeatherSeries synthetic_year(std::uint64_t seed, std::size_t days, int year) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const Site site = coastal_site();
  const HourStamp start = make_stamp(year, 1, 1);
  WeatherSeries s(site, start, days * 24);

  ClearnessLaw law;
  law.lo = 0.2, law.hi = 0.8, law.alpha = 3.0, law.beta = 2.0;
  WeibullLaw wlaw{2.2, 5.5};

  std::vector<double> temp(days * 24), rh(days * 24), wind(days * 24), wdir(days * 24), ghi(days * 24), dhi(days * 24),
      bni(days * 24), sun(days * 24), okta(days * 24);
  double zk = 0.0, zw = 0.0, noise_t = 0.0;
  for (std::size_t d = 0; d < days; ++d) {
    zk = 0.5 * zk + std::sqrt(1 - 0.25) * g(rng);
    const double kt = law.quantile(std::clamp(normal_cdf(zk), 1e-9, 1 - 1e-9));
    const int doy = day_of_year(start + static_cast<HourStamp>(d * 24));
    const auto geo = solar_geometry(site, doy);
    const auto prof = hourly_profile(kt, geo);
    const double cloud = std::clamp(9.6 * (1.0 - kt) - 1.0, 0.0, 8.0);
    for (int h = 0; h < 24; ++h) {
      const std::size_t i = d * 24 + static_cast<std::size_t>(h);
      ghi[i] = prof[static_cast<std::size_t>(h)];
      const double h0 = geo.h0_hourly[static_cast<std::size_t>(h)];
      const double kth = h0 > 0.0 ? std::clamp(ghi[i] / h0, 0.0, 1.0) : 0.0;
      dhi[i] = ghi[i] * erbs_diffuse_fraction(kth);
      bni[i] = beam_normal(ghi[i], dhi[i], mean_cos_zenith(geo, h));
      sun[i] = ghi[i] > 0.0 ? std::clamp((kth - 0.2) / 0.55, 0.0, 1.0) : 0.0;
      okta[i] = cloud;
      noise_t = 0.9 * noise_t + 0.6 * std::sqrt(1 - 0.81) * g(rng);
      const double season = 2.5 * std::cos(2 * std::numbers::pi * (doy - 40) / 365.0);
      const double diurnal = 3.5 * std::sin(2 * std::numbers::pi * (h - 9) / 24.0);
      temp[i] = 25.0 + season + diurnal * (0.5 + kt) + 3.0 * (kt - 0.55) + noise_t;
      rh[i] = std::clamp(78.0 - 2.2 * (temp[i] - 25.0) + 3.0 * g(rng), 30.0, 100.0);
      zw = 0.85 * zw + std::sqrt(1 - 0.85 * 0.85) * g(rng);
      wind[i] = wlaw.quantile(std::clamp(normal_cdf(zw), 1e-9, 1 - 1e-9));
      wdir[i] = std::clamp(110.0 + 35.0 * g(rng), 0.0, 359.0);
    }
  }
  s.set_column(Variable::temp, temp);
  s.set_column(Variable::rh, rh);
  s.set_column(Variable::wind, wind);
  s.set_column(Variable::wind_dir, wdir);
  s.set_column(Variable::ghi, ghi);
  s.set_column(Variable::dhi, dhi);
  s.set_column(Variable::bni, bni);
  s.set_column(Variable::sunfrac, sun);
  s.set_column(Variable::okta, okta);
  s.validate();
  return s;
}

PlantedShapes planted_shapes(std::uint64_t seed, std::size_t per_class, double noise) {
  PlantedShapes p;
  for (int h = 0; h < 24; ++h) {
    const double x = (h + 0.5 - 6.0) / 12.0;  // 0 at 06:00, 1 at 18:00
    const double bell = (x > 0.0 && x < 1.0) ? std::sin(std::numbers::pi * x) : 0.0;
    const double morning = (x > 0.0 && x < 1.0) ? std::sin(std::numbers::pi * x) * std::exp(-3.0 * std::max(0.0, x - 0.4)) : 0.0;
    p.shapes[0][static_cast<std::size_t>(h)] = 130.0 * bell;
    p.shapes[1][static_cast<std::size_t>(h)] = 700.0 * morning;
    p.shapes[2][static_cast<std::size_t>(h)] = 950.0 * bell;
  }
  for (std::size_t c = 0; c < 3; ++c) p.labels.insert(p.labels.end(), per_class, c);
  std::mt19937_64 rng(seed);
  std::shuffle(p.labels.begin(), p.labels.end(), rng);
  std::normal_distribution<double> g;
  const std::size_t days = p.labels.size();
  p.series = WeatherSeries(coastal_site(), make_stamp(2001, 1, 1), days * 24);
  std::vector<double> ghi(days * 24), temp(days * 24), rh(days * 24);
  for (std::size_t d = 0; d < days; ++d) {
    const auto c = p.labels[d];
    const double day_scale = 1.0 + noise * g(rng);
    for (std::size_t h = 0; h < 24; ++h) {
      const std::size_t i = d * 24 + h;
      ghi[i] = std::clamp(p.shapes[c][h] * day_scale * (1.0 + noise * g(rng)), 0.0, 1500.0);
      temp[i] = 24.0 + 2.0 * static_cast<double>(c) + std::sin(2 * std::numbers::pi * (static_cast<double>(h) - 9) / 24.0) + 0.3 * g(rng);
      rh[i] = std::clamp(80.0 - 5.0 * static_cast<double>(c) + 2.0 * g(rng), 0.0, 100.0);
    }
  }
  p.series.set_column(Variable::ghi, ghi);
  p.series.set_column(Variable::temp, temp);
  p.series.set_column(Variable::rh, rh);
  return p;
}

WeatherSeries constant_weather(std::size_t hours, double temp, double rh, double ghi) {
  WeatherSeries s(coastal_site(), make_stamp(2001, 1, 1), hours);
  s.set_column(Variable::temp, std::vector<double>(hours, temp));
  s.set_column(Variable::rh, std::vector<double>(hours, rh));
  s.set_column(Variable::ghi, std::vector<double>(hours, ghi));
  return s;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("synthmet-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace synthmet::fixtures
