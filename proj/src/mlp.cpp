#include "synthmet/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"
#include "synthmet/kernels.hpp"

namespace synthmet {

Network::Network(std::size_t n_in, std::size_t n_hidden, std::size_t n_out)
    : inputs(n_in), hidden(n_hidden), outputs(n_out), params(parameter_count(n_in, n_hidden, n_out), 0.0) {}

void Network::forward(std::span<const double> x, std::span<double> y) const {
  const double* p = params.data();
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t o = 0; o < outputs; ++o) y[o] = p[b2() + o];
  for (std::size_t h = 0; h < hidden; ++h) {
    double a = p[b1() + h];
    for (std::size_t i = 0; i < inputs; ++i) a += p[w1() + h * inputs + i] * x[i];
    const double t = std::tanh(a);
    for (std::size_t o = 0; o < outputs; ++o) y[o] += p[w2() + o * hidden + h] * t;
  }
}

double mlp_loss(const Network& net, const RowMatrix& x, const RowMatrix& y) {
  std::vector<double> out(net.outputs);
  double sq = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    net.forward({x.row(r).data(), net.inputs}, out);
    for (std::size_t o = 0; o < net.outputs; ++o) {
      const double e = out[o] - y(r, static_cast<Eigen::Index>(o));
      sq += e * e;
    }
  }
  return sq / static_cast<double>(static_cast<std::size_t>(x.rows()) * net.outputs);
}

Normalizer Normalizer::fit(const RowMatrix& m) {
  Normalizer n;
  const double rows = static_cast<double>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double mean = m.col(c).sum() / rows;
    const double var = (m.col(c).array() - mean).square().sum() / rows;
    n.mean.push_back(mean);
    n.sd.push_back(var > 1e-24 ? std::sqrt(var) : 1.0);
  }
  return n;
}

std::vector<double> Regressor::predict(std::span<const double> x) const {
  std::vector<double> z(net.inputs);
  for (std::size_t i = 0; i < net.inputs; ++i) z[i] = in.apply(i, x[i]);
  std::vector<double> y(net.outputs);
  net.forward(z, y);
  for (std::size_t o = 0; o < net.outputs; ++o) y[o] = out.invert(o, y[o]);
  return y;
}

RegressorFit fit_regressor(const RowMatrix& x, const RowMatrix& y, const MlpConfig& config, std::uint64_t seed) {
  if (x.rows() != y.rows() || x.rows() < 10) throw PreconditionError("regressor needs matching rows, at least 10");
  if (config.hidden == 0 || config.batch == 0 || config.epochs < 1) throw PreconditionError("invalid MLP configuration");
  if (!(config.validation_fraction > 0.0 && config.validation_fraction < 1.0))
    throw PreconditionError("validation fraction must lie in (0, 1)");
  const auto rows = static_cast<std::size_t>(x.rows());
  const auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(config.validation_fraction * static_cast<double>(rows))));
  const std::size_t n_train = rows - n_val;

  RegressorFit fit;
  fit.train_rows = n_train;
  fit.validation_rows = n_val;
  Regressor& model = fit.model;
  model.in = Normalizer::fit(x.topRows(static_cast<Eigen::Index>(n_train)));
  model.out = Normalizer::fit(y.topRows(static_cast<Eigen::Index>(n_train)));

  RowMatrix xn(x.rows(), x.cols()), yn(y.rows(), y.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) xn(r, c) = model.in.apply(static_cast<std::size_t>(c), x(r, c));
    for (Eigen::Index c = 0; c < y.cols(); ++c) yn(r, c) = model.out.apply(static_cast<std::size_t>(c), y(r, c));
  }

  const auto n_in = static_cast<std::size_t>(x.cols());
  const auto n_out = static_cast<std::size_t>(y.cols());
  Network& net = model.net;
  net = Network(n_in, config.hidden, n_out);
  std::mt19937_64 rng(seed);
  {
    const double a1 = std::sqrt(6.0 / static_cast<double>(n_in + config.hidden));
    const double a2 = std::sqrt(6.0 / static_cast<double>(config.hidden + n_out));
    std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
    for (std::size_t k = net.w1(); k < net.b1(); ++k) net.params[k] = u1(rng);
    for (std::size_t k = net.w2(); k < net.b2(); ++k) net.params[k] = u2(rng);
  }

  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(net.params.size()), velocity(net.params.size(), 0.0);
  const auto gradient = config.parallel ? parallel::mlp_gradient : serial::mlp_gradient;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n_train; start += config.batch) {
      const std::size_t len = std::min(config.batch, n_train - start);
      const double loss = gradient(net, xn, yn, std::span<const std::size_t>(order).subspan(start, len), grad);
      if (!std::isfinite(loss)) throw NumericalError("MLP training produced a non-finite loss");
      epoch_loss += loss * static_cast<double>(len);
      for (std::size_t k = 0; k < grad.size(); ++k) {
        velocity[k] = config.momentum * velocity[k] - config.learning_rate * grad[k];
        net.params[k] += velocity[k];
      }
    }
    fit.training_loss = epoch_loss / static_cast<double>(n_train);
    if (!std::isfinite(fit.training_loss)) throw NumericalError("MLP training produced a non-finite loss");
  }

  std::vector<double> out(n_out), sq_units(n_out, 0.0);
  double sq = 0.0;
  for (std::size_t r = n_train; r < rows; ++r) {
    net.forward({xn.row(static_cast<Eigen::Index>(r)).data(), n_in}, out);
    for (std::size_t o = 0; o < n_out; ++o) {
      const double e = out[o] - yn(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(o));
      sq += e * e;
      sq_units[o] += e * e * model.out.sd[o] * model.out.sd[o];
    }
  }
  fit.validation_rmse = std::sqrt(sq / static_cast<double>(n_val * n_out));
  for (double s : sq_units) fit.validation_rmse_units.push_back(std::sqrt(s / static_cast<double>(n_val)));
  return fit;
}

std::array<double, 6> mlp_predictors(int hour, double ghi, double wind, double temp_prev, double rh_prev) {
  const double a = 2.0 * std::numbers::pi * (hour + 0.5) / 24.0;
  return {std::sin(a), std::cos(a), ghi, wind, temp_prev, rh_prev};
}

MlpSamples mlp_samples(const WeatherSeries& series) {
  for (Variable v : {Variable::ghi, Variable::wind, Variable::temp, Variable::rh})
    if (!series.has(v)) throw DataError(std::string("MLP fit needs column ") + std::string(info(v).column));
  const auto ghi = series.column(Variable::ghi);
  const auto wind = series.column(Variable::wind);
  const auto t = series.column(Variable::temp);
  const auto rh = series.column(Variable::rh);
  std::vector<std::size_t> keep;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series.time(i) != series.time(i - 1) + 1) continue;
    if (is_missing(ghi[i]) || is_missing(wind[i]) || is_missing(t[i]) || is_missing(rh[i]) || is_missing(t[i - 1]) ||
        is_missing(rh[i - 1]))
      continue;
    keep.push_back(i);
  }
  MlpSamples s;
  s.x.resize(static_cast<Eigen::Index>(keep.size()), 6);
  s.y.resize(static_cast<Eigen::Index>(keep.size()), 2);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const std::size_t i = keep[k];
    const auto p = mlp_predictors(hour_of_day(series.time(i)), ghi[i], wind[i], t[i - 1], rh[i - 1]);
    for (std::size_t c = 0; c < 6; ++c) s.x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = p[c];
    s.y(static_cast<Eigen::Index>(k), 0) = t[i];
    s.y(static_cast<Eigen::Index>(k), 1) = rh[i];
  }
  return s;
}

MlpModel fit_mlp(const WeatherSeries& series, const MlpConfig& config, std::uint64_t seed) {
  const auto samples = mlp_samples(series);
  if (samples.x.rows() < 1000)
    throw DataError("MLP fit needs at least 1000 complete hours, got " + std::to_string(samples.x.rows()));
  auto fit = fit_regressor(samples.x, samples.y, config, seed);
  MlpModel m;
  m.regressor = std::move(fit.model);
  m.config = config;
  m.validation_rmse = fit.validation_rmse;
  m.validation_rmse_units = std::move(fit.validation_rmse_units);
  m.n = static_cast<std::size_t>(samples.x.rows());
  return m;
}

std::array<double, 2> predict_mlp(const MlpModel& model, std::span<const double> predictors) {
  if (predictors.size() != kMlpInputs.size()) throw PreconditionError("MLP expects 6 predictors");
  for (std::size_t i = 0; i < predictors.size(); ++i)
    if (!std::isfinite(predictors[i])) throw PreconditionError(std::string("missing MLP predictor ") + kMlpInputs[i]);
  const auto y = model.regressor.predict(predictors);
  return {std::clamp(y[0], -40.0, 60.0), std::clamp(y[1], 0.0, 100.0)};
}

double evaluate_mlp(const MlpModel& model, const WeatherSeries& series) {
  const auto s = mlp_samples(series);
  if (s.x.rows() == 0) throw DataError("no complete hours to evaluate");
  double sq = 0.0;
  for (Eigen::Index r = 0; r < s.x.rows(); ++r) {
    const auto y = predict_mlp(model, {s.x.row(r).data(), 6});
    for (std::size_t o = 0; o < 2; ++o) {
      const double e = (y[o] - s.y(r, static_cast<Eigen::Index>(o))) / model.regressor.out.sd[o];
      sq += e * e;
    }
  }
  return std::sqrt(sq / static_cast<double>(2 * s.x.rows()));
}

void to_json(nlohmann::json& j, const MlpModel& m) {
  const auto& r = m.regressor;
  j = {{"inputs", kMlpInputs},
       {"outputs", kMlpOutputs},
       {"hidden", r.net.hidden},
       {"params", r.net.params},
       {"input_mean", r.in.mean},
       {"input_sd", r.in.sd},
       {"output_mean", r.out.mean},
       {"output_sd", r.out.sd},
       {"validation_rmse", m.validation_rmse},
       {"validation_rmse_units", m.validation_rmse_units},
       {"n", m.n},
       {"training", {{"epochs", m.config.epochs}, {"batch", m.config.batch}, {"learning_rate", m.config.learning_rate},
                     {"momentum", m.config.momentum}, {"validation_fraction", m.config.validation_fraction}}}};
}

void from_json(const nlohmann::json& j, MlpModel& m) {
  const auto hidden = j.at("hidden").get<std::size_t>();
  Regressor& r = m.regressor;
  r.net = Network(kMlpInputs.size(), hidden, kMlpOutputs.size());
  r.net.params = j.at("params").get<std::vector<double>>();
  r.in = {j.at("input_mean").get<std::vector<double>>(), j.at("input_sd").get<std::vector<double>>()};
  r.out = {j.at("output_mean").get<std::vector<double>>(), j.at("output_sd").get<std::vector<double>>()};
  if (r.net.params.size() != Network::parameter_count(kMlpInputs.size(), hidden, kMlpOutputs.size()) ||
      r.in.mean.size() != kMlpInputs.size() || r.in.sd.size() != kMlpInputs.size() ||
      r.out.mean.size() != kMlpOutputs.size() || r.out.sd.size() != kMlpOutputs.size())
    throw DataError("MLP entry: parameter sizes do not match the topology");
  for (double p : r.net.params)
    if (!std::isfinite(p)) throw DataError("MLP entry: non-finite weight");
  m.validation_rmse = j.value("validation_rmse", 0.0);
  m.validation_rmse_units = j.value("validation_rmse_units", std::vector<double>{});
  m.n = j.value("n", std::size_t{0});
  m.config.hidden = hidden;
  if (j.contains("training")) {
    const auto& t = j.at("training");
    m.config.epochs = t.value("epochs", m.config.epochs);
    m.config.batch = t.value("batch", m.config.batch);
    m.config.learning_rate = t.value("learning_rate", m.config.learning_rate);
    m.config.momentum = t.value("momentum", m.config.momentum);
    m.config.validation_fraction = t.value("validation_fraction", m.config.validation_fraction);
  }
}

}  // namespace synthmet
