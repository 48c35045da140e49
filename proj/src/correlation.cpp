#include "synthmet/correlation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"
#include "synthmet/solar.hpp"

namespace synthmet {

namespace {

using Q = Quantity;
using F = CorrelationForm;

const std::vector<CorrelationSpec> kRegistry = {
    {"angstrom_black", {Q::sunfrac}, Q::kt, F::polynomial, 1, {0.25, 0.50}},
    {"angstrom_black_inverse", {Q::kt}, Q::sunfrac, F::polynomial, 1, {-0.5, 2.0}},
    {"hay", {Q::sunfrac}, Q::kt, F::polynomial, 2, {}},
    {"hay_inverse", {Q::kt}, Q::sunfrac, F::polynomial, 2, {}},
    {"klein", {Q::kt, Q::sunfrac}, Q::kd, F::polynomial, 1, {}},
    {"page", {Q::kt}, Q::kd, F::polynomial, 1, {1.00, -1.13}},
    {"gopinathan1", {Q::kt, Q::sunfrac}, Q::kd, F::polynomial, 1, {0.87813, -0.33280, -0.53039}},
    {"iqbal", {Q::sunfrac}, Q::kd, F::polynomial, 2, {}},
    {"erbs", {Q::kt_hourly}, Q::kd_hourly, F::erbs, 0,
     {1.0, -0.09, 0.9511, -0.1604, 4.388, -16.638, 12.336, 0.165}},
    {"castagnoli", {Q::okta}, Q::kt, F::polynomial, 2, {}},
    {"barri", {Q::okta}, Q::kt, F::polynomial, 1, {}},
    {"rangarajan", {Q::okta}, Q::sunfrac, F::polynomial, 2, {}},
    {"gopinathan2", {Q::kt, Q::sunfrac}, Q::kd, F::polynomial, 2, {}},
    {"soler", {Q::kt, Q::sunfrac}, Q::kd, F::polynomial, 3, {}},
    {"liu_jordan", {Q::kt}, Q::kd, F::polynomial, 3, {1.390, -4.027, 5.531, -3.108}},
};

constexpr double kErbsLow = 0.22;
constexpr double kErbsHigh = 0.80;

double polynomial(std::span<const double> p, std::span<const double> x, int degree) {
  double y = p[0];
  std::size_t k = 1;
  for (double xi : x) {
    double pw = 1.0;
    for (int d = 1; d <= degree; ++d) {
      pw *= xi;
      y += p[k++] * pw;
    }
  }
  return y;
}

double erbs(std::span<const double> p, double kt) {
  if (kt <= kErbsLow) return p[0] + p[1] * kt;
  if (kt <= kErbsHigh) return p[2] + kt * (p[3] + kt * (p[4] + kt * (p[5] + kt * p[6])));
  return p[7];
}

// Least squares with a rank check; columns of X are already the basis functions.
Eigen::VectorXd ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols())
    throw NumericalError("singular design matrix (collinear or constant inputs)");
  return qr.solve(y);
}

}  // namespace

const std::vector<CorrelationSpec>& correlation_registry() { return kRegistry; }

const CorrelationSpec& find_correlation(std::string_view name) {
  for (const auto& s : kRegistry)
    if (s.name == name) return s;
  throw PreconditionError("unknown correlation '" + std::string(name) + "'");
}

std::size_t parameter_count(const CorrelationSpec& spec) {
  if (spec.form == F::erbs) return 8;
  return 1 + spec.inputs.size() * static_cast<std::size_t>(spec.degree);
}

CorrelationModel default_correlation(std::string_view name) {
  const auto& spec = find_correlation(name);
  if (spec.default_params.empty())
    throw PreconditionError("correlation '" + std::string(name) + "' has no published coefficients; fit it first");
  CorrelationModel m;
  m.name = std::string(spec.name);
  m.inputs = spec.inputs;
  m.output = spec.output;
  m.params = spec.default_params;
  for (Q q : spec.inputs) m.domain.push_back(quantity_range(q));
  return m;
}

double erbs_diffuse_fraction(double kt) {
  return erbs(find_correlation("erbs").default_params, kt);
}

CorrelationPrediction evaluate_correlation(const CorrelationModel& model, std::span<const double> inputs) {
  const auto& spec = find_correlation(model.name);
  if (inputs.size() != spec.inputs.size())
    throw PreconditionError("correlation '" + model.name + "' expects " + std::to_string(spec.inputs.size()) + " inputs");
  if (model.params.size() != parameter_count(spec))
    throw PreconditionError("correlation '" + model.name + "' has a malformed parameter vector");
  CorrelationPrediction out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!std::isfinite(inputs[i])) throw PreconditionError("non-finite correlation input");
    if (i < model.domain.size() &&
        (inputs[i] < model.domain[i].first - 1e-12 || inputs[i] > model.domain[i].second + 1e-12))
      out.out_of_domain = true;
  }
  const double raw = spec.form == F::erbs ? erbs(model.params, inputs[0])
                                          : polynomial(model.params, inputs, spec.degree);
  const auto [lo, hi] = quantity_range(model.output);
  out.value = std::clamp(raw, lo, hi);
  out.clamped = out.value != raw;
  return out;
}

CorrelationSamples correlation_samples(const CorrelationSpec& spec, const WeatherSeries& series) {
  std::vector<Quantity> needed = spec.inputs;
  needed.push_back(spec.output);
  std::vector<Variable> vars;
  auto need = [&](Variable v) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  };
  bool hourly = false;
  for (Q q : needed) {
    switch (q) {
      case Q::kt: need(Variable::ghi); break;
      case Q::sunfrac: need(Variable::sunfrac); break;
      case Q::kd: need(Variable::ghi); need(Variable::dhi); break;
      case Q::okta: need(Variable::okta); break;
      case Q::kt_hourly: need(Variable::ghi); hourly = true; break;
      case Q::kd_hourly: need(Variable::ghi); need(Variable::dhi); hourly = true; break;
      default: throw PreconditionError("correlation quantity not extractable from a series");
    }
  }
  for (Variable v : vars)
    if (!series.has(v)) throw DataError("series lacks " + std::string(info(v).name) + " needed by " + std::string(spec.name));

  CorrelationSamples out;
  const auto days = complete_days(series, vars);
  out.days = days.size();
  auto col = [&](Variable v, const DayBlock& d) { return series.column(v).subspan(d.first, 24); };
  auto sum = [](std::span<const double> s) {
    double t = 0.0;
    for (double x : s) t += x;
    return t;
  };

  for (const DayBlock& d : days) {
    const SolarGeometry g = solar_geometry(series.site(), day_of_year(d.day));
    if (!hourly) {
      std::vector<double> row;
      bool ok = true;
      auto value = [&](Q q) -> double {
        switch (q) {
          case Q::kt:
            if (g.h0_daily <= 0.0) { ok = false; return 0.0; }
            return clearness_index(sum(col(Variable::ghi, d)), g.h0_daily).kt;
          case Q::sunfrac:
            if (g.day_length <= 0.0) { ok = false; return 0.0; }
            return std::clamp(sum(col(Variable::sunfrac, d)) / g.day_length, 0.0, 1.0);
          case Q::kd: {
            const double gsum = sum(col(Variable::ghi, d));
            if (gsum <= 0.0) { ok = false; return 0.0; }
            return std::clamp(sum(col(Variable::dhi, d)) / gsum, 0.0, 1.0);
          }
          case Q::okta: return sum(col(Variable::okta, d)) / 24.0;
          default: ok = false; return 0.0;
        }
      };
      for (Q q : spec.inputs) row.push_back(value(q));
      const double y = value(spec.output);
      if (!ok) continue;
      out.inputs.push_back(std::move(row));
      out.output.push_back(y);
    } else {
      const auto ghi = col(Variable::ghi, d);
      const auto dhi = series.has(Variable::dhi) ? col(Variable::dhi, d) : std::span<const double>{};
      for (int h = 0; h < 24; ++h) {
        // skip low-sun hours where the ratios are dominated by noise
        if (g.h0_hourly[h] < 10.0 || ghi[h] <= 0.0) continue;
        auto value = [&](Q q) -> double {
          if (q == Q::kt_hourly) return std::clamp(ghi[h] / g.h0_hourly[h], 0.0, 1.0);
          return std::clamp(dhi[h] / ghi[h], 0.0, 1.0);
        };
        std::vector<double> row;
        for (Q q : spec.inputs) row.push_back(value(q));
        out.inputs.push_back(std::move(row));
        out.output.push_back(value(spec.output));
      }
    }
  }
  return out;
}

CorrelationModel fit_correlation(std::string_view name, const CorrelationSamples& samples) {
  const auto& spec = find_correlation(name);
  const std::size_t n = samples.output.size();
  const std::size_t k = spec.inputs.size();
  if (samples.inputs.size() != n) throw PreconditionError("sample input/output length mismatch");
  for (const auto& row : samples.inputs)
    if (row.size() != k) throw PreconditionError("sample row has the wrong number of inputs");
  const std::size_t np = parameter_count(spec);
  if (n < np + 1) throw DataError("insufficient data to fit '" + std::string(name) + "'");

  CorrelationModel m;
  m.name = std::string(spec.name);
  m.inputs = spec.inputs;
  m.output = spec.output;
  m.n = n;

  if (spec.form == F::polynomial) {
    Eigen::MatrixXd X(n, np);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      std::size_t c = 1;
      for (std::size_t j = 0; j < k; ++j) {
        double pw = 1.0;
        for (int d = 1; d <= spec.degree; ++d) X(i, c++) = (pw *= samples.inputs[i][j]);
      }
      y(i) = samples.output[i];
    }
    const Eigen::VectorXd beta = ols(X, y);
    m.params.assign(beta.data(), beta.data() + beta.size());
  } else {
    m.params = spec.default_params;
    struct Branch {
      double lo, hi;
      int degree;
      std::size_t offset;
    };
    for (const Branch& b : {Branch{-1.0, kErbsLow, 1, 0}, Branch{kErbsLow, kErbsHigh, 4, 2}, Branch{kErbsHigh, 2.0, 0, 7}}) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < n; ++i) {
        const double kt = samples.inputs[i][0];
        if (kt > b.lo && kt <= b.hi) rows.push_back(i);
      }
      const std::size_t nb = static_cast<std::size_t>(b.degree) + 1;
      if (rows.size() < 3 * nb) continue;  // too sparse: keep the published branch
      Eigen::MatrixXd X(rows.size(), nb);
      Eigen::VectorXd y(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        double pw = 1.0;
        for (std::size_t d = 0; d < nb; ++d) {
          X(r, d) = pw;
          pw *= samples.inputs[rows[r]][0];
        }
        y(r) = samples.output[rows[r]];
      }
      const Eigen::VectorXd beta = ols(X, y);
      for (std::size_t d = 0; d < nb; ++d) m.params[b.offset + d] = beta(d);
    }
  }

  m.domain.assign(k, {0.0, 0.0});
  for (std::size_t j = 0; j < k; ++j) {
    double lo = samples.inputs[0][j], hi = lo;
    for (const auto& row : samples.inputs) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    m.domain[j] = {lo, hi};
  }
  double se = 0.0, bias = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = evaluate_correlation(m, samples.inputs[i]).value - samples.output[i];
    se += r * r;
    bias += r;
  }
  m.rmse = std::sqrt(se / static_cast<double>(n));
  m.mbe = bias / static_cast<double>(n);
  return m;
}

CorrelationModel fit_correlation(std::string_view name, const WeatherSeries& series) {
  const auto& spec = find_correlation(name);
  const auto samples = correlation_samples(spec, series);
  if (samples.days < 30)
    throw DataError("fitting '" + std::string(name) + "' needs at least 30 complete days, found " +
                    std::to_string(samples.days));
  return fit_correlation(name, samples);
}

void to_json(nlohmann::json& j, const CorrelationModel& m) {
  std::vector<std::string> inputs;
  for (Q q : m.inputs) inputs.emplace_back(to_string(q));
  std::vector<std::array<double, 2>> domain;
  for (const auto& [lo, hi] : m.domain) domain.push_back({lo, hi});
  j = {{"kind", "correlation"}, {"name", m.name},  {"inputs", inputs}, {"output", to_string(m.output)},
       {"params", m.params},    {"rmse", m.rmse},  {"mbe", m.mbe},   {"n", m.n},
       {"domain", domain}};
}

void from_json(const nlohmann::json& j, CorrelationModel& m) {
  m.name = j.at("name").get<std::string>();
  const auto& spec = find_correlation(m.name);
  m.inputs.clear();
  for (const auto& s : j.at("inputs")) {
    auto q = quantity_from_name(s.get<std::string>());
    if (!q) throw DataError("unknown correlation input '" + s.get<std::string>() + "'");
    m.inputs.push_back(*q);
  }
  auto out = quantity_from_name(j.at("output").get<std::string>());
  if (!out) throw DataError("unknown correlation output");
  m.output = *out;
  if (m.inputs != spec.inputs || m.output != spec.output)
    throw DataError("correlation '" + m.name + "' inputs/output do not match the registry form");
  m.params = j.at("params").get<std::vector<double>>();
  if (m.params.size() != parameter_count(spec)) throw DataError("correlation '" + m.name + "' has a wrong parameter count");
  m.rmse = j.at("rmse").get<double>();
  m.mbe = j.at("mbe").get<double>();
  m.n = j.at("n").get<std::size_t>();
  m.domain.clear();
  if (j.contains("domain"))
    for (const auto& d : j.at("domain")) m.domain.emplace_back(d.at(0).get<double>(), d.at(1).get<double>());
}

}  // namespace synthmet
