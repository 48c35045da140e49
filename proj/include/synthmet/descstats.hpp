#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "synthmet/weather.hpp"

namespace synthmet {

struct SummaryTable {
  Variable variable{};
  IndicatorKind kind{};
  std::string period;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double sd = 0.0;  // n-1 denominator; 0 for a single value
  std::size_t count = 0;
};

SummaryTable summarize(const DailyIndicator& indicator, std::string period = "all");

struct Histogram {
  std::vector<double> edges;  // bins are [e_i, e_i+1), the last one closed
  std::vector<std::size_t> counts;
  std::vector<double> frequencies;
};

/// Equal-width bins over [min, max]. A single distinct value is binned over [v-0.5, v+0.5].
Histogram histogram(std::span<const double> values, std::size_t bins);
/// Explicit strictly ascending edges; every value must fall inside them.
Histogram histogram(std::span<const double> values, std::vector<double> edges);

struct ContingencyResult {
  std::vector<std::vector<std::size_t>> table;  // rows = bins of a, cols = bins of b
  std::vector<double> row_edges;
  std::vector<double> col_edges;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Regularized upper incomplete gamma Q(dof/2, chi2/2).
double chi2_survival(double chi2, int dof);

/// Pearson statistic for an observed r x c table with non-empty margins.
ContingencyResult chi2_test(const std::vector<std::vector<std::size_t>>& table);

/// Bins both indicators by quantiles (terciles by default), merges empty bins
/// outward, then runs the Pearson test. Indicators must cover the same days.
ContingencyResult chi2_independence(const DailyIndicator& a, const DailyIndicator& b,
                                    std::size_t bins_a = 3, std::size_t bins_b = 3);

/// Quantile edges (type 7) used for contingency binning; returns bins+1 edges.
std::vector<double> quantile_edges(std::span<const double> values, std::size_t bins);

void to_json(nlohmann::json& j, const SummaryTable& s);
void to_json(nlohmann::json& j, const Histogram& h);
void to_json(nlohmann::json& j, const ContingencyResult& c);

/// Aligned-column text rendering used by the CLI report.
std::string format_report(const SummaryTable& s);
std::string format_report(const ContingencyResult& c);
std::string histogram_csv(const Histogram& h);

}  // namespace synthmet
