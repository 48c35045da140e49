#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "synthmet/kernels.hpp"

using namespace synthmet;

namespace {

RowMatrix random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
  std::normal_distribution<double> g;
  RowMatrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

}  // namespace

TEST(Distances, NaiveOracleAndSerialParallelAgree) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> size(2, 60), dim(1, 8);
    const auto pts = random_points(rng, size(rng), dim(rng));
    const auto s = serial::pairwise_sq_distances(pts);
    const auto p = parallel::pairwise_sq_distances(pts);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      EXPECT_EQ(s(i, i), 0.0);
      for (Eigen::Index j = 0; j < pts.rows(); ++j) {
        double d2 = 0.0;
        for (Eigen::Index c = 0; c < pts.cols(); ++c) d2 += (pts(i, c) - pts(j, c)) * (pts(i, c) - pts(j, c));
        EXPECT_NEAR(s(i, j), d2, 1e-12 * (1 + d2));
        EXPECT_EQ(s(i, j), p(i, j));
        EXPECT_EQ(s(i, j), s(j, i));
      }
    }
  }
}

TEST(ClosestPair, TieGoesToSmallestIndices) {
  Eigen::MatrixXd c(4, 4);
  c << 0, 5, 2, 9,  //
      5, 0, 7, 2,   //
      2, 7, 0, 2,   //
      9, 2, 2, 0;
  const std::vector<char> all(4, 1);
  for (const auto& r : {serial::closest_active_pair(c, all), parallel::closest_active_pair(c, all)}) {
    EXPECT_EQ(r.i, 0u);
    EXPECT_EQ(r.j, 2u);
    EXPECT_EQ(r.cost, 2.0);
  }
  const std::vector<char> some = {0, 1, 1, 1};
  const auto r = parallel::closest_active_pair(c, some);
  EXPECT_EQ(r.i, 1u);
  EXPECT_EQ(r.j, 3u);
}

TEST(ClosestPair, SerialParallelAgreeOnRandomMatrices) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coin(0, 3), val(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial;
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) c(i, j) = c(j, i) = i == j ? 0.0 : val(rng);  // many ties
    std::vector<char> active(static_cast<std::size_t>(n));
    for (auto& a : active) a = coin(rng) != 0;
    active[0] = active[1] = 1;
    const auto s = serial::closest_active_pair(c, active);
    const auto p = parallel::closest_active_pair(c, active);
    EXPECT_EQ(s.i, p.i);
    EXPECT_EQ(s.j, p.j);
    EXPECT_EQ(s.cost, p.cost);
  }
}

TEST(Gradient, SerialParallelAgree) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    Network net(6, 8, 2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (double& w : net.params) w = u(rng);
    const auto x = random_points(rng, 200, 6);
    const auto y = random_points(rng, 200, 2);
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < 200; r += 1 + static_cast<std::size_t>(trial)) rows.push_back(r);
    std::vector<double> gs(net.params.size()), gp(net.params.size());
    const double ls = serial::mlp_gradient(net, x, y, rows, gs);
    const double lp = parallel::mlp_gradient(net, x, y, rows, gp);
    EXPECT_NEAR(ls, lp, 1e-12 * ls);
    for (std::size_t k = 0; k < gs.size(); ++k) EXPECT_NEAR(gs[k], gp[k], 1e-12 * (1 + std::abs(gs[k])));
  }
}

TEST(Psychro, SerialParallelAgree) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> t(-10, 45), h(0, 100);
  std::vector<double> temp(5000), rh(5000);
  for (std::size_t i = 0; i < temp.size(); ++i) {
    temp[i] = t(rng);
    rh[i] = h(rng);
  }
  rh[7] = 0.0;
  const auto s = serial::psychro_columns(temp, rh, 101325.0);
  const auto p = parallel::psychro_columns(temp, rh, 101325.0);
  EXPECT_EQ(s.vapor_pressure, p.vapor_pressure);
  EXPECT_EQ(s.humidity_ratio, p.humidity_ratio);
  EXPECT_EQ(s.enthalpy, p.enthalpy);
  for (std::size_t i = 0; i < temp.size(); ++i) {
    if (std::isnan(s.dew_point[i])) {
      EXPECT_TRUE(std::isnan(p.dew_point[i]));
    } else {
      EXPECT_EQ(s.dew_point[i], p.dew_point[i]);
    }
  }
  EXPECT_TRUE(std::isnan(s.dew_point[7]));
}
