#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "synthmet/error.hpp"
#include "synthmet/kernels.hpp"
#include "synthmet/mlp.hpp"

using namespace synthmet;

namespace {

RowMatrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RowMatrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

Network random_network(std::size_t in, std::size_t hidden, std::size_t out, std::mt19937_64& rng) {
  Network net(in, hidden, out);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (double& p : net.params) p = u(rng);
  return net;
}

}  // namespace

TEST(Network, ForwardByHand) {
  Network net(2, 1, 1);
  // W1 = [0.5, -1], b1 = 0.2, W2 = [2], b2 = -0.1
  net.params = {0.5, -1.0, 0.2, 2.0, -0.1};
  std::vector<double> y(1);
  net.forward(std::vector<double>{1.0, 0.5}, y);
  EXPECT_NEAR(y[0], 2.0 * std::tanh(0.5 - 0.5 + 0.2) - 0.1, 1e-15);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    auto net = random_network(3, 5, 2, rng);
    const auto x = random_matrix(40, 3, rng);
    const auto y = random_matrix(40, 2, rng);
    std::vector<std::size_t> rows(40);
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<double> grad(net.params.size());
    const double loss = serial::mlp_gradient(net, x, y, rows, grad);
    EXPECT_NEAR(loss, mlp_loss(net, x, y), 1e-12);
    for (std::size_t k = 0; k < net.params.size(); ++k) {
      const double h = 1e-6, p = net.params[k];
      net.params[k] = p + h;
      const double up = mlp_loss(net, x, y);
      net.params[k] = p - h;
      const double down = mlp_loss(net, x, y);
      net.params[k] = p;
      EXPECT_NEAR(grad[k], (up - down) / (2 * h), 1e-7) << "parameter " << k;
    }
  }
}

TEST(Normalizer, PopulationMomentsAndConstantColumns) {
  RowMatrix m(4, 2);
  m << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto n = Normalizer::fit(m);
  EXPECT_NEAR(n.mean[0], 2.5, 1e-15);
  EXPECT_NEAR(n.sd[0], std::sqrt(1.25), 1e-15);
  EXPECT_EQ(n.sd[1], 1.0);
  EXPECT_NEAR(n.invert(0, n.apply(0, 3.7)), 3.7, 1e-15);
}

TEST(Regressor, LearnsLinearMap) {
  std::mt19937_64 rng(2);
  const auto x = random_matrix(3000, 3, rng);
  RowMatrix y(3000, 1);
  for (Eigen::Index r = 0; r < 3000; ++r) y(r, 0) = 0.5 * x(r, 0) - 0.3 * x(r, 1) + 0.2 * x(r, 2);
  MlpConfig c;
  c.epochs = 40;
  const auto fit = fit_regressor(x, y, c, 3);
  EXPECT_LT(fit.validation_rmse, 0.05);
  EXPECT_EQ(fit.train_rows, 2400u);
  EXPECT_EQ(fit.validation_rows, 600u);
  const auto p = fit.model.predict(std::vector<double>{1.0, 1.0, 1.0});
  EXPECT_NEAR(p[0], 0.4, 0.05);
}

TEST(Regressor, DeterministicAndSerialParallelAgree) {
  std::mt19937_64 rng(4);
  const auto x = random_matrix(500, 4, rng);
  const auto y = random_matrix(500, 2, rng);
  MlpConfig c;
  c.epochs = 5;
  const auto a = fit_regressor(x, y, c, 9);
  const auto b = fit_regressor(x, y, c, 9);
  EXPECT_TRUE(a.model == b.model);
  c.parallel = false;
  const auto s = fit_regressor(x, y, c, 9);
  for (std::size_t k = 0; k < a.model.net.params.size(); ++k)
    EXPECT_NEAR(a.model.net.params[k], s.model.net.params[k], 1e-9);
}

TEST(Regressor, Preconditions) {
  std::mt19937_64 rng(5);
  const auto x = random_matrix(50, 2, rng);
  MlpConfig c;
  EXPECT_THROW(fit_regressor(x, random_matrix(40, 1, rng), c, 1), PreconditionError);
  c.validation_fraction = 1.0;
  EXPECT_THROW(fit_regressor(x, random_matrix(50, 1, rng), c, 1), PreconditionError);
  c = {};
  c.learning_rate = 1e6;
  EXPECT_THROW(fit_regressor(x, random_matrix(50, 1, rng) * 1e6, c, 1), NumericalError);
}

TEST(Samples, PredictorsFromSeries) {
  const auto s = fixtures::synthetic_year(6, 5);
  const auto m = mlp_samples(s);
  ASSERT_EQ(m.x.rows(), static_cast<Eigen::Index>(s.size() - 1));
  const auto p = mlp_predictors(hour_of_day(s.time(10)), s.column(Variable::ghi)[10], s.column(Variable::wind)[10],
                                s.column(Variable::temp)[9], s.column(Variable::rh)[9]);
  for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(m.x(9, static_cast<Eigen::Index>(c)), p[c]);
  EXPECT_EQ(m.y(9, 0), s.column(Variable::temp)[10]);
  EXPECT_NEAR(p[0] * p[0] + p[1] * p[1], 1.0, 1e-15);
}

TEST(Model, FitPredictAndRoundTrip) {
  const auto s = fixtures::synthetic_year(7, 120);
  MlpConfig c;
  c.epochs = 15;
  const auto m = fit_mlp(s, c, 11);
  EXPECT_LT(m.validation_rmse, 0.6);
  EXPECT_EQ(m.validation_rmse_units.size(), 2u);
  EXPECT_LT(evaluate_mlp(m, s), 0.6);
  const auto y = predict_mlp(m, std::vector<double>{0, 1, 500, 4, 26, 75});
  EXPECT_GE(y[1], 0.0);
  EXPECT_LE(y[1], 100.0);
  EXPECT_THROW(predict_mlp(m, std::vector<double>{0, 1, std::nan(""), 4, 26, 75}), PreconditionError);
  const nlohmann::json j = m;
  const auto back = nlohmann::json::parse(j.dump()).get<MlpModel>();
  EXPECT_TRUE(back.regressor == m.regressor);
  EXPECT_THROW(fit_mlp(fixtures::synthetic_year(7, 20), c, 1), DataError);
}
