#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "synthmet/weather.hpp"

namespace synthmet::fixtures {

/// Tropical coastal site at the latitude of Reunion island.
Site coastal_site();

/// Hourly year with every column populated. Daily kt follows an AR(1) under a
/// Beta law, radiation is decomposed consistently, temperature and humidity
/// respond to season, hour and cloudiness, wind is Weibull with persistence.
WeatherSeries synthetic_year(std::uint64_t seed, std::size_t days = 365, int year = 2001);

struct PlantedShapes {
  WeatherSeries series;
  std::vector<std::size_t> labels;             // true class of every day
  std::array<std::array<double, 24>, 3> shapes;  // GHI templates, Wh/m2
};

/// Days drawn from three GHI evolutions (overcast, morning sun, clear) with
/// multiplicative noise, shuffled.
PlantedShapes planted_shapes(std::uint64_t seed, std::size_t per_class = 40, double noise = 0.05);

/// Constant-weather series for building tests.
WeatherSeries constant_weather(std::size_t hours, double temp, double rh, double ghi = 0.0);

/// Removes its directory on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);

}  // namespace synthmet::fixtures
