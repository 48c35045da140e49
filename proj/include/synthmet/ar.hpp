#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "synthmet/laws.hpp"

namespace synthmet {

/// Biased sample autocorrelation r[0..max_lag] (r[0] = 1). Missing values
/// (NaN) are skipped pairwise.
std::vector<double> autocorrelation(std::span<const double> values, int max_lag);

struct LevinsonResult {
  std::vector<std::vector<double>> phi;  // phi[p] holds the p coefficients of order p
  std::vector<double> variance;          // innovation variance of each order, in units of r[0]
  std::vector<double> reflection;        // partial autocorrelations, reflection[p - 1] for order p
};

LevinsonResult levinson_durbin(std::span<const double> acf, int max_order);

/// Autoregressive model on a standardised (optionally normal-scored) series.
/// A raw value x at phase h maps to y = (to_normal(marginal, x) - level[h]) / scale[h],
/// and y follows y_t = sum phi_i y_{t-i} + sigma e_t.
struct ARModel {
  std::string variable;
  int order = 0;
  std::vector<double> phi;
  double sigma = 1.0;
  std::vector<double> level{0.0};  // one entry per phase (1 or 24)
  std::vector<double> scale{1.0};
  Marginal marginal;
  double aic = 0.0;
  std::size_t n = 0;

  std::size_t period() const { return level.size(); }
  /// Innovation sd in the units of the transformed series (first phase).
  double innovation_sd() const { return sigma * scale.front(); }
  bool stationary() const;
  /// Lag-1 autocorrelation implied by the coefficients.
  double theoretical_lag1() const;

  double to_standard(double x, std::size_t phase) const;
  double from_standard(double y, std::size_t phase, double shift = 0.0) const;
};

bool operator==(const ARModel& a, const ARModel& b);

struct ARFitOptions {
  int max_order = 3;
  /// 24 standardises each hour of day separately; 1 standardises globally.
  std::size_t period = 1;
  std::size_t start_phase = 0;  // phase of values[0]
  Marginal marginal;            // applied before standardising
  bool empirical_score = false; // replace the marginal with the sample's normal-score map
  std::string variable;
};

/// Yule-Walker fit of orders 0..max_order, order chosen by minimum AIC.
ARModel fit_ar(std::span<const double> values, const ARFitOptions& options = {});

inline constexpr int kWarmup = 500;

/// Standardised AR path of length n after the warm-up.
std::vector<double> simulate_standard(const ARModel& model, std::size_t n, std::uint64_t seed);

/// simulate_standard mapped back to raw values.
std::vector<double> simulate_ar(const ARModel& model, std::size_t n, std::uint64_t seed,
                                double shift = 0.0, std::size_t start_phase = 0);

void to_json(nlohmann::json& j, const ARModel& m);
void from_json(const nlohmann::json& j, ARModel& m);

}  // namespace synthmet
