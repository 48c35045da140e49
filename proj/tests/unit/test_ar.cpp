#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "synthmet/ar.hpp"
#include "synthmet/error.hpp"

using namespace synthmet;

namespace {

std::vector<double> ar_path(std::vector<double> phi, double sigma, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, sigma);
  std::vector<double> x(n + 1000, 0.0);
  for (std::size_t t = phi.size(); t < x.size(); ++t) {
    x[t] = g(rng);
    for (std::size_t i = 0; i < phi.size(); ++i) x[t] += phi[i] * x[t - 1 - i];
  }
  return {x.begin() + 1000, x.end()};
}

// Direct Yule-Walker solve: Toeplitz(r[0..p-1]) phi = r[1..p].
std::vector<double> yule_walker_oracle(const std::vector<double>& r, int p) {
  Eigen::MatrixXd R(p, p);
  Eigen::VectorXd b(p);
  for (int i = 0; i < p; ++i) {
    b(i) = r[static_cast<std::size_t>(i + 1)];
    for (int j = 0; j < p; ++j) R(i, j) = r[static_cast<std::size_t>(std::abs(i - j))];
  }
  const Eigen::VectorXd phi = R.ldlt().solve(b);
  return {phi.data(), phi.data() + p};
}

}  // namespace

TEST(Acf, HandComputed) {
  const std::vector<double> v = {1, 2, 3, 4};
  // mean 2.5, deviations -1.5 -0.5 0.5 1.5; c0 = 5/4, c1 = (0.75 - 0.25 + 0.75)/4
  const auto r = autocorrelation(v, 2);
  EXPECT_NEAR(r[0], 1.0, 1e-15);
  EXPECT_NEAR(r[1], 1.25 / 5.0, 1e-15);
  EXPECT_NEAR(r[2], (-0.75 - 0.75) / 5.0, 1e-15);
  EXPECT_THROW(autocorrelation(std::vector<double>(5, 1.0), 1), DataError);
}

TEST(Acf, MissingPairsSkipped) {
  std::vector<double> v = {1, 2, std::nan(""), 4, 5};
  const auto r = autocorrelation(v, 1);
  // mean 3; pairs (1,2), (4,5): (-2)(-1) + (1)(2) = 4; c0 = (4+1+1+4)/4
  EXPECT_NEAR(r[1], 4.0 / 10.0, 1e-15);
}

TEST(Levinson, MatchesDirectSolveProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = ar_path({u(rng), u(rng) * 0.5}, 1.0, 3000, static_cast<std::uint64_t>(trial));
    const auto r = autocorrelation(x, 3);
    const auto ld = levinson_durbin(r, 3);
    for (int p = 1; p <= 3; ++p) {
      const auto want = yule_walker_oracle(r, p);
      for (int i = 0; i < p; ++i) EXPECT_NEAR(ld.phi[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)], want[static_cast<std::size_t>(i)], 1e-10);
      // innovation variance = r0 - phi . r[1..p]
      double v = 1.0;
      for (int i = 0; i < p; ++i) v -= want[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i + 1)];
      EXPECT_NEAR(ld.variance[static_cast<std::size_t>(p)], v, 1e-10);
      EXPECT_NEAR(ld.reflection[static_cast<std::size_t>(p - 1)], want.back(), 1e-10);
    }
  }
}

TEST(Fit, RecoversAr1) {
  const auto x = ar_path({0.8}, 1.0, 10000, 7);
  const auto m = fit_ar(x, {.max_order = 3});
  ASSERT_GE(m.order, 1);
  EXPECT_NEAR(m.phi[0], 0.8, 0.05);
  EXPECT_NEAR(m.theoretical_lag1(), 0.8, 0.05);
  EXPECT_TRUE(m.stationary());
  EXPECT_EQ(m.n, 10000u);
}

TEST(Fit, RecoversAr2AndChoosesOrder) {
  const auto x = ar_path({0.5, 0.3}, 2.0, 20000, 8);
  const auto m = fit_ar(x);
  EXPECT_EQ(m.order, 2);
  EXPECT_NEAR(m.phi[0], 0.5, 0.03);
  EXPECT_NEAR(m.phi[1], 0.3, 0.03);
  // rho1 = phi1 / (1 - phi2)
  EXPECT_NEAR(m.theoretical_lag1(), m.phi[0] / (1 - m.phi[1]), 1e-12);
  const auto white = ar_path({}, 1.0, 5000, 9);
  EXPECT_EQ(fit_ar(white).order, 0);
}

TEST(Fit, Preconditions) {
  EXPECT_THROW(fit_ar(std::vector<double>(100, 1.0)), DataError);
  EXPECT_THROW(fit_ar(ar_path({0.5}, 1, 500, 1), {.max_order = 4}), PreconditionError);
  EXPECT_THROW(fit_ar(ar_path({0.5}, 1, 500, 1), {.period = 12}), PreconditionError);
}

TEST(Fit, PerHourStandardisation) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<double> x(24 * 300);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 20 + 5 * std::sin(static_cast<double>(i % 24)) + (1 + i % 24 * 0.1) * g(rng);
  const auto m = fit_ar(x, {.period = 24});
  ASSERT_EQ(m.period(), 24u);
  for (std::size_t h = 0; h < 24; ++h) {
    EXPECT_NEAR(m.level[h], 20 + 5 * std::sin(static_cast<double>(h)), 0.3);
    EXPECT_NEAR(m.scale[h], 1 + h * 0.1, 0.25);
  }
}

TEST(Transform, StandardRoundTripProperty) {
  ARModel m;
  m.level = std::vector<double>(24);
  m.scale = std::vector<double>(24);
  for (std::size_t h = 0; h < 24; ++h) m.level[h] = static_cast<double>(h), m.scale[h] = 1.0 + static_cast<double>(h) / 10;
  m.marginal = WeibullLaw{2, 5};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 15);
  for (int i = 0; i < 300; ++i) {
    const double x = u(rng);
    const auto phase = static_cast<std::size_t>(i);
    EXPECT_NEAR(m.from_standard(m.to_standard(x, phase), phase), x, 1e-7 * x);
  }
}

TEST(Simulate, DeterministicAndWarmedUp) {
  ARModel m;
  m.order = 1, m.phi = {0.9}, m.sigma = std::sqrt(1 - 0.81);
  const auto a = simulate_standard(m, 20000, 42);
  EXPECT_EQ(a, simulate_standard(m, 20000, 42));
  EXPECT_NE(a, simulate_standard(m, 20000, 43));
  const auto r = autocorrelation(a, 1);
  EXPECT_NEAR(r[1], 0.9, 0.02);
  double mean = 0, var = 0;
  for (double v : a) mean += v;
  mean /= a.size();
  for (double v : a) var += (v - mean) * (v - mean);
  EXPECT_NEAR(var / a.size(), 1.0, 0.1);
}

TEST(Stationarity, CompanionRoots) {
  ARModel m;
  m.order = 2;
  m.phi = {0.5, 0.3};
  EXPECT_TRUE(m.stationary());
  m.phi = {0.5, 0.6};
  EXPECT_FALSE(m.stationary());
  m.order = 1, m.phi = {1.0};
  EXPECT_FALSE(m.stationary());
}

TEST(Json, RoundTripAndValidation) {
  auto m = fit_ar(ar_path({0.6}, 1, 2000, 2), {.marginal = std::monostate{}, .variable = "temp"});
  const nlohmann::json j = m;
  EXPECT_EQ(j.at("transform"), "identity");
  EXPECT_TRUE(nlohmann::json::parse(j.dump()).get<ARModel>() == m);
  auto bad = j;
  bad["phi"] = {1.2};
  bad["order"] = 1;
  EXPECT_THROW(bad.get<ARModel>(), DataError);
}
