#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace synthmet {

double normal_cdf(double z);
double normal_quantile(double p);

/// Two-parameter Weibull law for wind speed.
struct WeibullLaw {
  double shape = 2.0;  // k
  double scale = 5.0;  // lambda, m/s

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;
  double mean() const;
  bool operator==(const WeibullLaw&) const = default;
};

struct WeibullFit {
  WeibullLaw law;
  std::size_t n = 0;             // positive samples used
  double zero_fraction = 0.0;    // share of non-positive samples excluded
  int iterations = 0;
  double log_likelihood = 0.0;
};

/// Maximum likelihood: Newton on the shape equation from the moment estimate.
WeibullFit fit_weibull(std::span<const double> values);

enum class Climate { tropical, temperate };

std::string to_string(Climate c);
Climate climate_from_name(const std::string& name);

/// Beta density on a bounded clearness-index support.
struct ClearnessLaw {
  double lo = 0.0;
  double hi = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  Climate climate = Climate::tropical;
  double fitted_mean = 0.5;  // sample mean the law was fitted to
  std::size_t n = 0;

  double pdf(double kt) const;
  double cdf(double kt) const;
  double quantile(double p) const;
  double mean() const;
  bool operator==(const ClearnessLaw&) const = default;
};

/// Support = sample range padded by 0.02 (within [0,1]); Beta by method of moments.
ClearnessLaw fit_clearness_law(std::span<const double> kt_daily, Climate climate);

/// Empirical normal-score map: forward ranks to standard-normal quantiles,
/// inverse interpolates the empirical quantile function.
class NormalScoreMap {
 public:
  NormalScoreMap() = default;
  NormalScoreMap(std::vector<double> scores, std::vector<double> values);

  double forward(double x) const;
  double inverse(double z) const;
  const std::vector<double>& scores() const { return scores_; }
  const std::vector<double>& values() const { return values_; }
  bool operator==(const NormalScoreMap&) const = default;

 private:
  std::vector<double> scores_;  // ascending
  std::vector<double> values_;  // ascending, distinct
};

struct NormalScoreResult {
  std::vector<double> scores;
  NormalScoreMap map;
};

NormalScoreResult normal_score(std::span<const double> values);

/// Marginal distribution an AR model runs under. monostate = identity.
using Marginal = std::variant<std::monostate, WeibullLaw, ClearnessLaw, NormalScoreMap>;

double to_normal(const Marginal& m, double x);
double from_normal(const Marginal& m, double z);
/// Open interval of attainable values of the marginal.
std::pair<double, double> marginal_support(const Marginal& m);
std::string marginal_tag(const Marginal& m);

void to_json(nlohmann::json& j, const WeibullLaw& w);
void from_json(const nlohmann::json& j, WeibullLaw& w);
void to_json(nlohmann::json& j, const ClearnessLaw& c);
void from_json(const nlohmann::json& j, ClearnessLaw& c);
void to_json(nlohmann::json& j, const Marginal& m);
void from_json(const nlohmann::json& j, Marginal& m);

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
template <class Cdf>
double ks_distance(std::span<const double> sample, Cdf&& cdf);

}  // namespace synthmet

#include <algorithm>
#include <cmath>

namespace synthmet {

template <class Cdf>
double ks_distance(std::span<const double> sample, Cdf&& cdf) {
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

}  // namespace synthmet
