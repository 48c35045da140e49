#include "synthmet/descstats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"

namespace synthmet {

SummaryTable summarize(const DailyIndicator& indicator, std::string period) {
  const auto& v = indicator.values;
  if (v.empty()) throw PreconditionError("cannot summarize an empty indicator");
  SummaryTable s;
  s.variable = indicator.variable;
  s.kind = indicator.kind;
  s.period = std::move(period);
  s.count = v.size();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  // guard against rounding putting the mean a hair outside [min, max]
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

namespace {

void check_finite(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("histogram needs at least one value");
  for (double x : values)
    if (!std::isfinite(x)) throw PreconditionError("histogram input contains a non-finite value");
}

Histogram bin_values(std::span<const double> values, std::vector<double> edges) {
  Histogram h;
  h.edges = std::move(edges);
  const std::size_t nb = h.edges.size() - 1;
  h.counts.assign(nb, 0);
  for (double x : values) {
    if (x < h.edges.front() || x > h.edges.back())
      throw PreconditionError("value " + std::to_string(x) + " outside histogram edges");
    std::size_t b = static_cast<std::size_t>(std::upper_bound(h.edges.begin(), h.edges.end(), x) - h.edges.begin());
    b = b == 0 ? 0 : b - 1;
    if (b >= nb) b = nb - 1;  // last bin is closed
    ++h.counts[b];
  }
  const double n = static_cast<double>(values.size());
  for (std::size_t c : h.counts) h.frequencies.push_back(static_cast<double>(c) / n);
  return h;
}

}  // namespace

Histogram histogram(std::span<const double> values, std::size_t bins) {
  check_finite(values);
  if (bins == 0) throw PreconditionError("histogram needs at least one bin");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  edges.back() = hi;
  return bin_values(values, std::move(edges));
}

Histogram histogram(std::span<const double> values, std::vector<double> edges) {
  check_finite(values);
  if (edges.size() < 2) throw PreconditionError("histogram needs at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw PreconditionError("histogram edges must be strictly ascending (zero-width bin)");
  return bin_values(values, std::move(edges));
}

double chi2_survival(double chi2, int dof) {
  if (dof < 1) throw PreconditionError("chi-2 degrees of freedom must be >= 1");
  if (!(chi2 >= 0.0)) throw PreconditionError("chi-2 statistic must be >= 0");
  return boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
}

ContingencyResult chi2_test(const std::vector<std::vector<std::size_t>>& table) {
  const std::size_t r = table.size();
  if (r < 2) throw PreconditionError("contingency table needs at least 2 rows");
  const std::size_t c = table[0].size();
  if (c < 2) throw PreconditionError("contingency table needs at least 2 columns");
  std::vector<double> row(r, 0.0), col(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (table[i].size() != c) throw PreconditionError("ragged contingency table");
    for (std::size_t j = 0; j < c; ++j) {
      row[i] += static_cast<double>(table[i][j]);
      col[j] += static_cast<double>(table[i][j]);
    }
    total += row[i];
  }
  for (double m : row)
    if (m == 0.0) throw PreconditionError("contingency table has an empty row margin");
  for (double m : col)
    if (m == 0.0) throw PreconditionError("contingency table has an empty column margin");

  ContingencyResult out;
  out.table = table;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double expected = row[i] * col[j] / total;
      const double diff = static_cast<double>(table[i][j]) - expected;
      out.chi2 += diff * diff / expected;
    }
  }
  out.dof = static_cast<int>((r - 1) * (c - 1));
  out.p_value = chi2_survival(out.chi2, out.dof);
  return out;
}

std::vector<double> quantile_edges(std::span<const double> values, std::size_t bins) {
  if (values.empty() || bins == 0) throw PreconditionError("quantile binning needs values and bins");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  std::vector<double> edges(bins + 1);
  const double n1 = static_cast<double>(s.size() - 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    const double pos = n1 * static_cast<double>(i) / static_cast<double>(bins);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    edges[i] = k + 1 < s.size() ? s[k] + frac * (s[k + 1] - s[k]) : s[k];
  }
  return edges;
}

namespace {

// Assigns each value to a quantile bin, then folds empty bins into a neighbour.
std::pair<std::vector<std::size_t>, std::vector<double>> quantile_bins(std::span<const double> v, std::size_t bins) {
  auto edges = quantile_edges(v, bins);
  auto assign = [&](double x) {
    // interior edges only; ties at an edge go to the upper bin
    std::size_t b = 0;
    while (b + 1 < edges.size() - 1 && x >= edges[b + 1]) ++b;
    return b;
  };
  std::vector<std::size_t> label(v.size());
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (std::size_t i = 0; i < v.size(); ++i) ++counts[label[i] = assign(v[i])];

  // merge empty bins outward: an empty bin is absorbed by its lower neighbour
  // (the first bin by its upper neighbour)
  std::vector<std::size_t> remap(counts.size());
  std::vector<double> merged_edges{edges.front()};
  std::size_t next = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] == 0) {
      remap[b] = next == 0 ? 0 : next - 1;
      continue;
    }
    remap[b] = next++;
    if (next > 1) merged_edges.push_back(edges[b]);
  }
  merged_edges.push_back(edges.back());
  for (auto& l : label) l = remap[l];
  return {label, merged_edges};
}

}  // namespace

ContingencyResult chi2_independence(const DailyIndicator& a, const DailyIndicator& b, std::size_t bins_a,
                                    std::size_t bins_b) {
  if (a.values.size() != b.values.size())
    throw PreconditionError("indicators cover a different number of days");
  if (!a.days.empty() && !b.days.empty() && a.days != b.days)
    throw PreconditionError("indicators cover different days");
  auto [la, ea] = quantile_bins(a.values, bins_a);
  auto [lb, eb] = quantile_bins(b.values, bins_b);
  const std::size_t r = ea.size() - 1, c = eb.size() - 1;
  if (r < 2 || c < 2) throw DataError("fewer than 2 non-empty bins after merging");
  std::vector<std::vector<std::size_t>> table(r, std::vector<std::size_t>(c, 0));
  for (std::size_t i = 0; i < la.size(); ++i) ++table[la[i]][lb[i]];
  auto out = chi2_test(table);
  out.row_edges = std::move(ea);
  out.col_edges = std::move(eb);
  return out;
}

void to_json(nlohmann::json& j, const SummaryTable& s) {
  j = {{"variable", info(s.variable).name}, {"indicator", to_string(s.kind)}, {"period", s.period},
       {"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"sd", s.sd}, {"count", s.count}};
}

void to_json(nlohmann::json& j, const Histogram& h) {
  j = {{"edges", h.edges}, {"counts", h.counts}, {"frequencies", h.frequencies}};
}

void to_json(nlohmann::json& j, const ContingencyResult& c) {
  j = {{"table", c.table}, {"row_edges", c.row_edges}, {"col_edges", c.col_edges},
       {"chi2", c.chi2}, {"dof", c.dof}, {"p_value", c.p_value}};
}

std::string format_report(const SummaryTable& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%-10s %-12s %-10s %8s %12s %12s %12s %12s\n"
                "%-10s %-12s %-10s %8zu %12.4f %12.4f %12.4f %12.4f\n",
                "variable", "indicator", "period", "count", "mean", "min", "max", "sd",
                std::string(info(s.variable).name).c_str(), std::string(to_string(s.kind)).c_str(),
                s.period.c_str(), s.count, s.mean, s.min, s.max, s.sd);
  return buf;
}

std::string format_report(const ContingencyResult& c) {
  std::ostringstream os;
  os << "contingency table (rows: first indicator bins, cols: second indicator bins)\n";
  for (const auto& row : c.table) {
    for (std::size_t x : row) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%8zu", x);
      os << buf;
    }
    os << '\n';
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "chi2 %12.4f   dof %3d   p %10.6f\n", c.chi2, c.dof, c.p_value);
  os << buf;
  return os.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os << "lower,upper,count,frequency\n";
  char buf[128];
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%zu,%.10g\n", h.edges[i], h.edges[i + 1], h.counts[i], h.frequencies[i]);
    os << buf;
  }
  return os.str();
}

}  // namespace synthmet
