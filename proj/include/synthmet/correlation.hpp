#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "synthmet/quantity.hpp"
#include "synthmet/weather.hpp"

namespace synthmet {

enum class CorrelationForm {
  polynomial,  // intercept + sum over inputs of c * x^p, p = 1..degree
  erbs,        // piecewise diffuse fraction: linear | quartic | constant
};

/// One row of the correlation registry.
struct CorrelationSpec {
  std::string_view name;
  std::vector<Quantity> inputs;
  Quantity output;
  CorrelationForm form;
  int degree;                          // polynomial only
  std::vector<double> default_params;  // empty when the form must be fitted
};

const std::vector<CorrelationSpec>& correlation_registry();
const CorrelationSpec& find_correlation(std::string_view name);
std::size_t parameter_count(const CorrelationSpec& spec);

struct CorrelationModel {
  std::string name;
  std::vector<Quantity> inputs;
  Quantity output = Quantity::kt;
  std::vector<double> params;
  double rmse = 0.0;
  double mbe = 0.0;
  std::size_t n = 0;
  std::vector<std::pair<double, double>> domain;  // fitted input ranges
};

/// Registry entry with its published coefficients and a physical-range domain.
CorrelationModel default_correlation(std::string_view name);

struct CorrelationPrediction {
  double value = 0.0;
  bool out_of_domain = false;
  bool clamped = false;
};

CorrelationPrediction evaluate_correlation(const CorrelationModel& model, std::span<const double> inputs);

/// Erbs et al. diffuse fraction with the published coefficients.
double erbs_diffuse_fraction(double kt);

struct CorrelationSamples {
  std::vector<std::vector<double>> inputs;  // one row per sample
  std::vector<double> output;
  std::size_t days = 0;
};

/// Extracts the registry form's inputs and output from complete days of a series.
CorrelationSamples correlation_samples(const CorrelationSpec& spec, const WeatherSeries& series);

/// Ordinary least squares on the named form. Throws NumericalError on a rank-deficient design.
CorrelationModel fit_correlation(std::string_view name, const CorrelationSamples& samples);
/// Requires at least 30 complete days carrying every input and the output.
CorrelationModel fit_correlation(std::string_view name, const WeatherSeries& series);

void to_json(nlohmann::json& j, const CorrelationModel& m);
void from_json(const nlohmann::json& j, CorrelationModel& m);

}  // namespace synthmet
