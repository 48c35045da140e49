#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "synthmet/weather.hpp"

namespace synthmet {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One hidden tanh layer, linear output. Parameters are stored flat:
/// W1 (hidden x inputs, row-major), b1, W2 (outputs x hidden), b2.
struct Network {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;
  std::vector<double> params;

  Network() = default;
  Network(std::size_t n_in, std::size_t n_hidden, std::size_t n_out);

  static std::size_t parameter_count(std::size_t n_in, std::size_t n_hidden, std::size_t n_out) {
    return n_hidden * n_in + n_hidden + n_out * n_hidden + n_out;
  }
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return hidden * inputs; }
  std::size_t w2() const { return b1() + hidden; }
  std::size_t b2() const { return w2() + outputs * hidden; }

  void forward(std::span<const double> x, std::span<double> y) const;
  bool operator==(const Network&) const = default;
};

/// Mean squared error over rows and outputs.
double mlp_loss(const Network& net, const RowMatrix& x, const RowMatrix& y);

struct Normalizer {
  std::vector<double> mean;
  std::vector<double> sd;  // 1 for constant columns

  static Normalizer fit(const RowMatrix& m);
  double apply(std::size_t c, double v) const { return (v - mean[c]) / sd[c]; }
  double invert(std::size_t c, double z) const { return mean[c] + sd[c] * z; }
  bool operator==(const Normalizer&) const = default;
};

struct MlpConfig {
  std::size_t hidden = 8;
  int epochs = 60;
  std::size_t batch = 32;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double validation_fraction = 0.2;
  bool parallel = true;
};

struct Regressor {
  Network net;
  Normalizer in;
  Normalizer out;

  std::vector<double> predict(std::span<const double> x) const;
  bool operator==(const Regressor&) const = default;
};

struct RegressorFit {
  Regressor model;
  double validation_rmse = 0.0;             // normalised output space
  std::vector<double> validation_rmse_units;  // per output, physical units
  double training_loss = 0.0;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
};

/// Mini-batch SGD with momentum. The last validation_fraction of rows (in order)
/// is held out.
RegressorFit fit_regressor(const RowMatrix& x, const RowMatrix& y, const MlpConfig& config, std::uint64_t seed);

/// Rows of the black-box temperature/humidity model: predictors
/// (sin hour, cos hour, ghi, wind, previous temp, previous rh) -> (temp, rh).
inline constexpr std::array<const char*, 6> kMlpInputs = {"hour_sin", "hour_cos", "ghi", "wind", "temp_prev", "rh_prev"};
inline constexpr std::array<const char*, 2> kMlpOutputs = {"temp", "rh"};

struct MlpSamples {
  RowMatrix x;
  RowMatrix y;
};

MlpSamples mlp_samples(const WeatherSeries& series);
std::array<double, 6> mlp_predictors(int hour, double ghi, double wind, double temp_prev, double rh_prev);

struct MlpModel {
  Regressor regressor;
  MlpConfig config;
  double validation_rmse = 0.0;
  std::vector<double> validation_rmse_units;
  std::size_t n = 0;
};

/// Needs at least 1000 complete hours of predictors and targets.
MlpModel fit_mlp(const WeatherSeries& series, const MlpConfig& config, std::uint64_t seed);

/// Clamped (temperature, relative humidity). Throws PreconditionError on a missing predictor.
std::array<double, 2> predict_mlp(const MlpModel& model, std::span<const double> predictors);

/// One-step rmse in normalised output space on every complete row of a series.
double evaluate_mlp(const MlpModel& model, const WeatherSeries& series);

void to_json(nlohmann::json& j, const MlpModel& m);
void from_json(const nlohmann::json& j, MlpModel& m);

}  // namespace synthmet
