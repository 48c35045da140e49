#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "synthmet/error.hpp"
#include "synthmet/solar.hpp"

using namespace synthmet;
constexpr double kPi = std::numbers::pi;

namespace {

Site at(double lat, double lon = 0.0) { return {"s", lat, lon, 0.0, std::nullopt}; }

// Duffie & Beckman daily extraterrestrial radiation, Wh/m2.
double h0_oracle(double lat_deg, int n) {
  const double d = 23.45 * std::sin(2 * kPi * (284 + n) / 365.0) * kPi / 180;
  const double p = lat_deg * kPi / 180;
  const double ws = std::acos(std::clamp(-std::tan(p) * std::tan(d), -1.0, 1.0));
  const double e0 = 1 + 0.033 * std::cos(2 * kPi * n / 365.0);
  return 24.0 / kPi * 1367.0 * e0 * (std::cos(p) * std::cos(d) * std::sin(ws) + ws * std::sin(p) * std::sin(d));
}

}  // namespace

TEST(Geometry, DeclinationAnchors) {
  EXPECT_NEAR(declination_deg(172), 23.4498, 1e-4);
  EXPECT_NEAR(declination_deg(81), 0.0, 0.5);
  EXPECT_NEAR(declination_deg(355), -23.45, 0.05);
}

TEST(Geometry, DailyExtraterrestrialMatchesOracle) {
  EXPECT_NEAR(solar_geometry(at(-21), 15).h0_daily, 11680.7, 0.1);
  for (double lat : {-60.0, -21.0, 0.0, 35.0, 66.0})
    for (int n : {1, 80, 172, 265, 355}) EXPECT_NEAR(solar_geometry(at(lat), n).h0_daily, std::max(0.0, h0_oracle(lat, n)), 1e-6);
}

TEST(Geometry, HourlyExtraterrestrialSumsToDaily) {
  for (double lat : {-21.0, 45.0})
    for (int n : {10, 200}) {
      const auto g = solar_geometry(at(lat, 7.5), n);
      double sum = 0;
      for (double x : g.h0_hourly) sum += x;
      EXPECT_NEAR(sum, g.h0_daily, 1e-6 * g.h0_daily);
    }
}

TEST(Geometry, EquinoxEquatorIsSymmetric) {
  const auto g = solar_geometry(at(0.0), 81);
  EXPECT_NEAR(g.day_length, 12.0, 0.05);
  for (int h = 0; h < 12; ++h) EXPECT_NEAR(g.h0_hourly[h], g.h0_hourly[23 - h], 1.0);
}

TEST(Geometry, PolarNight) {
  const auto g = solar_geometry(at(80.0), 355);
  EXPECT_EQ(g.h0_daily, 0.0);
  EXPECT_THROW(clearness_index(100.0, g.h0_daily), PreconditionError);
  EXPECT_THROW(solar_geometry(at(0), 367), PreconditionError);
}

TEST(Clearness, ClampedIndex) {
  EXPECT_NEAR(clearness_index(5000, 10000).kt, 0.5, 1e-15);
  const auto c = clearness_index(12000, 10000);
  EXPECT_EQ(c.kt, 1.0);
  EXPECT_TRUE(c.clamped);
}

TEST(Disaggregation, PropertyProfileConservesDailyTotal) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lat(-55, 55), kt(0, 1);
  std::uniform_int_distribution<int> day(1, 365);
  for (int i = 0; i < 200; ++i) {
    const auto g = solar_geometry(at(lat(rng), 55.5), day(rng));
    const double k = kt(rng);
    const auto p = hourly_profile(k, g);
    double sum = 0;
    for (int h = 0; h < 24; ++h) {
      EXPECT_GE(p[h], 0.0);
      if (g.h0_hourly[h] == 0.0) EXPECT_EQ(p[h], 0.0);
      sum += p[h];
    }
    EXPECT_NEAR(sum, k * g.h0_daily, 1e-9 * g.h0_daily + 1e-12);
  }
  EXPECT_THROW(hourly_profile(1.2, solar_geometry(at(0), 1)), PreconditionError);
}

TEST(Disaggregation, RatioPeaksNearNoon) {
  const auto r = hourly_ratio(solar_geometry(at(-21, 45.0), 100));
  const auto peak = std::max_element(r.begin(), r.end()) - r.begin();
  EXPECT_TRUE(peak == 11 || peak == 12);
}

TEST(DailyKt, FromHourlySeries) {
  const auto s = fixtures::synthetic_year(8, 10);
  const auto k = daily_kt(s);
  ASSERT_EQ(k.kt.size(), 10u);
  const auto g = solar_geometry(s.site(), 3);
  double sum = 0;
  for (std::size_t h = 48; h < 72; ++h) sum += s.column(Variable::ghi)[h];
  EXPECT_NEAR(k.kt[2], sum / g.h0_daily, 1e-12);
}

TEST(Beam, NormalComponent) {
  EXPECT_NEAR(beam_normal(600, 200, 0.5), 800, 1e-12);
  EXPECT_EQ(beam_normal(10, 5, 0.01), 0.0);
  EXPECT_EQ(beam_normal(100, 150, 0.5), 0.0);
  EXPECT_EQ(beam_normal(1400, 0, 0.2), 1500.0);
}
