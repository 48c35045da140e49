#include "synthmet/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"

namespace synthmet {

namespace {

constexpr double kPClamp = 1e-12;

double clamp_p(double p) { return std::clamp(p, kPClamp, 1.0 - kPClamp); }

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw PreconditionError("normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

// ---------------------------------------------------------------- Weibull

double WeibullLaw::pdf(double x) const {
  if (x < 0.0) return 0.0;
  const double z = x / scale;
  return shape / scale * std::pow(z, shape - 1.0) * std::exp(-std::pow(z, shape));
}

double WeibullLaw::cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / scale, shape)); }

double WeibullLaw::quantile(double p) const { return scale * std::pow(-std::log1p(-p), 1.0 / shape); }

double WeibullLaw::mean() const { return scale * std::tgamma(1.0 + 1.0 / shape); }

WeibullFit fit_weibull(std::span<const double> values) {
  std::vector<double> x;
  x.reserve(values.size());
  std::size_t non_positive = 0;
  for (double v : values) {
    if (!std::isfinite(v)) throw PreconditionError("wind sample contains a non-finite value");
    if (v > 0.0)
      x.push_back(v);
    else
      ++non_positive;
  }
  if (x.empty()) throw DataError("all wind samples are zero");
  if (x.size() < 100) throw DataError("Weibull fit needs at least 100 positive samples, got " + std::to_string(x.size()));

  const double n = static_cast<double>(x.size());
  const double xmax = *std::max_element(x.begin(), x.end());
  std::vector<double> ly(x.size());  // log(x / xmax) <= 0 keeps powers bounded
  double mean = 0.0, lbar = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ly[i] = std::log(x[i] / xmax);
    mean += x[i];
    lbar += ly[i];
  }
  mean /= n;
  lbar /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n - 1.0;

  WeibullFit fit;
  fit.n = x.size();
  fit.zero_fraction = static_cast<double>(non_positive) / static_cast<double>(values.size());

  double k = var > 0.0 ? std::pow(std::sqrt(var) / mean, -1.086) : 1.0;
  k = std::clamp(k, 0.05, 50.0);
  bool converged = false;
  for (int it = 1; it <= 100; ++it) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double l : ly) {
      const double w = std::exp(k * l);
      s0 += w;
      s1 += w * l;
      s2 += w * l * l;
    }
    const double r1 = s1 / s0;
    const double g = r1 - 1.0 / k - lbar;
    const double dg = s2 / s0 - r1 * r1 + 1.0 / (k * k);
    double step = g / dg;
    while (k - step <= 0.0) step *= 0.5;
    k -= step;
    fit.iterations = it;
    if (std::abs(step) < 1e-8) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("Weibull shape iteration did not converge in 100 iterations");

  double s0 = 0.0;
  for (double l : ly) s0 += std::exp(k * l);
  fit.law.shape = k;
  fit.law.scale = xmax * std::pow(s0 / n, 1.0 / k);

  double ll = 0.0;
  for (double v : x) {
    const double z = v / fit.law.scale;
    ll += std::log(k / fit.law.scale) + (k - 1.0) * std::log(z) - std::pow(z, k);
  }
  fit.log_likelihood = ll;
  return fit;
}

// ---------------------------------------------------------------- clearness

std::string to_string(Climate c) { return c == Climate::tropical ? "tropical" : "temperate"; }

Climate climate_from_name(const std::string& name) {
  if (name == "tropical") return Climate::tropical;
  if (name == "temperate") return Climate::temperate;
  throw PreconditionError("unknown climate '" + name + "' (tropical | temperate)");
}

double ClearnessLaw::pdf(double kt) const {
  if (kt <= lo || kt >= hi) return 0.0;
  const double w = hi - lo;
  return boost::math::ibeta_derivative(alpha, beta, (kt - lo) / w) / w;
}

double ClearnessLaw::cdf(double kt) const {
  if (kt <= lo) return 0.0;
  if (kt >= hi) return 1.0;
  return boost::math::ibeta(alpha, beta, (kt - lo) / (hi - lo));
}

double ClearnessLaw::quantile(double p) const {
  if (p <= 0.0) return lo;
  if (p >= 1.0) return hi;
  return lo + (hi - lo) * boost::math::ibeta_inv(alpha, beta, p);
}

double ClearnessLaw::mean() const { return lo + (hi - lo) * alpha / (alpha + beta); }

ClearnessLaw fit_clearness_law(std::span<const double> kt, Climate climate) {
  if (kt.size() < 30) throw DataError("clearness law needs at least 30 daily values, got " + std::to_string(kt.size()));
  for (double v : kt)
    if (!(v > 0.0 && v < 1.0)) throw DataError("daily kt values must lie in (0, 1)");
  const double n = static_cast<double>(kt.size());
  const double mean = std::accumulate(kt.begin(), kt.end(), 0.0) / n;
  double var = 0.0;
  for (double v : kt) var += (v - mean) * (v - mean);
  var /= n - 1.0;
  if (!(var > 0.0)) throw DataError("degenerate clearness sample: zero variance");
  const auto [mn, mx] = std::minmax_element(kt.begin(), kt.end());

  ClearnessLaw law;
  law.climate = climate;
  law.n = kt.size();
  law.fitted_mean = mean;
  law.lo = std::max(0.0, *mn - 0.02);
  law.hi = std::min(1.0, *mx + 0.02);
  const double w = law.hi - law.lo;
  const double m = (mean - law.lo) / w;
  const double v = var / (w * w);
  const double common = m * (1.0 - m) / v - 1.0;
  if (!(common > 0.0)) throw DataError("clearness sample too dispersed for a Beta law");
  law.alpha = m * common;
  law.beta = (1.0 - m) * common;
  return law;
}

// ---------------------------------------------------------------- normal score

NormalScoreMap::NormalScoreMap(std::vector<double> scores, std::vector<double> values)
    : scores_(std::move(scores)), values_(std::move(values)) {
  if (scores_.size() != values_.size() || values_.size() < 2)
    throw PreconditionError("normal-score map needs at least two distinct points");
}

double NormalScoreMap::forward(double x) const { return interpolate(values_, scores_, x); }
double NormalScoreMap::inverse(double z) const { return interpolate(scores_, values_, z); }

NormalScoreResult normal_score(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });

  NormalScoreResult out;
  out.scores.resize(n);
  std::vector<double> distinct, dscores;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based average rank of ties
    const double z = normal_quantile((avg_rank - 0.5) / static_cast<double>(n));
    for (std::size_t k = i; k <= j; ++k) out.scores[order[k]] = z;
    distinct.push_back(values[order[i]]);
    dscores.push_back(z);
    i = j + 1;
  }
  if (distinct.size() < 2) throw PreconditionError("normal score needs at least two distinct values");
  out.map = NormalScoreMap(std::move(dscores), std::move(distinct));
  return out;
}

// ---------------------------------------------------------------- marginal

double to_normal(const Marginal& m, double x) {
  return std::visit(
      [x](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, std::monostate>) return x;
        else if constexpr (std::is_same_v<T, NormalScoreMap>) return law.forward(x);
        else return normal_quantile(clamp_p(law.cdf(x)));
      },
      m);
}

double from_normal(const Marginal& m, double z) {
  return std::visit(
      [z](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, std::monostate>) return z;
        else if constexpr (std::is_same_v<T, NormalScoreMap>) return law.inverse(z);
        else return law.quantile(clamp_p(normal_cdf(z)));
      },
      m);
}

std::pair<double, double> marginal_support(const Marginal& m) {
  return std::visit(
      [](const auto& law) -> std::pair<double, double> {
        constexpr double inf = std::numeric_limits<double>::infinity();
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, std::monostate>) return {-inf, inf};
        else if constexpr (std::is_same_v<T, WeibullLaw>) return {0.0, inf};
        else if constexpr (std::is_same_v<T, ClearnessLaw>) return {law.lo, law.hi};
        else return {law.values().front(), law.values().back()};
      },
      m);
}

std::string marginal_tag(const Marginal& m) {
  switch (m.index()) {
    case 0: return "identity";
    case 1: return "normal-score:weibull";
    case 2: return "normal-score:clearness";
    default: return "normal-score:empirical";
  }
}

void to_json(nlohmann::json& j, const WeibullLaw& w) { j = {{"shape", w.shape}, {"scale", w.scale}}; }

void from_json(const nlohmann::json& j, WeibullLaw& w) {
  w.shape = j.at("shape").get<double>();
  w.scale = j.at("scale").get<double>();
  if (!(w.shape > 0.0 && w.scale > 0.0)) throw DataError("Weibull parameters must be positive");
}

void to_json(nlohmann::json& j, const ClearnessLaw& c) {
  j = {{"support", {c.lo, c.hi}}, {"alpha", c.alpha}, {"beta", c.beta},
       {"climate", to_string(c.climate)}, {"fitted_mean", c.fitted_mean}, {"n", c.n}};
}

void from_json(const nlohmann::json& j, ClearnessLaw& c) {
  c.lo = j.at("support").at(0).get<double>();
  c.hi = j.at("support").at(1).get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.climate = climate_from_name(j.at("climate").get<std::string>());
  c.fitted_mean = j.at("fitted_mean").get<double>();
  c.n = j.value("n", std::size_t{0});
  if (!(c.lo >= 0.0 && c.hi <= 1.0 && c.lo < c.hi && c.alpha > 0.0 && c.beta > 0.0))
    throw DataError("invalid clearness law parameters");
}

void to_json(nlohmann::json& j, const Marginal& m) {
  std::visit(
      [&j](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, std::monostate>) j = {{"type", "identity"}};
        else if constexpr (std::is_same_v<T, WeibullLaw>) { j = law; j["type"] = "weibull"; }
        else if constexpr (std::is_same_v<T, ClearnessLaw>) { j = law; j["type"] = "clearness"; }
        else j = {{"type", "empirical"}, {"scores", law.scores()}, {"values", law.values()}};
      },
      m);
}

void from_json(const nlohmann::json& j, Marginal& m) {
  const auto type = j.at("type").get<std::string>();
  if (type == "identity") m = std::monostate{};
  else if (type == "weibull") m = j.get<WeibullLaw>();
  else if (type == "clearness") m = j.get<ClearnessLaw>();
  else if (type == "empirical")
    m = NormalScoreMap(j.at("scores").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
  else throw DataError("unknown marginal type '" + type + "'");
}

}  // namespace synthmet
