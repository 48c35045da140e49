#include "synthmet/ar.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"
#include "synthmet/weather.hpp"

namespace synthmet {

std::vector<double> autocorrelation(std::span<const double> values, int max_lag) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values)
    if (!is_missing(v)) {
      sum += v;
      ++n;
    }
  if (n == 0) throw PreconditionError("autocorrelation of an empty series");
  const double mean = sum / static_cast<double>(n);
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t i = static_cast<std::size_t>(k); i < values.size(); ++i) {
      const double a = values[i], b = values[i - static_cast<std::size_t>(k)];
      if (!is_missing(a) && !is_missing(b)) acc += (a - mean) * (b - mean);
    }
    r[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
  }
  if (!(r[0] > 0.0)) throw DataError("constant series has no autocorrelation");
  const double r0 = r[0];
  for (double& x : r) x /= r0;
  return r;
}

LevinsonResult levinson_durbin(std::span<const double> acf, int max_order) {
  if (max_order < 0 || acf.size() < static_cast<std::size_t>(max_order) + 1)
    throw PreconditionError("Levinson-Durbin needs acf up to lag max_order");
  if (!(acf[0] > 0.0)) throw PreconditionError("acf[0] must be positive");
  LevinsonResult out;
  out.phi.push_back({});
  out.variance.push_back(acf[0]);
  for (int p = 1; p <= max_order; ++p) {
    const auto& prev = out.phi.back();
    double num = acf[static_cast<std::size_t>(p)];
    for (int i = 1; i < p; ++i) num -= prev[static_cast<std::size_t>(i - 1)] * acf[static_cast<std::size_t>(p - i)];
    const double e_prev = out.variance.back();
    if (!(e_prev > 0.0)) throw NumericalError("Levinson-Durbin: non-positive prediction error");
    const double kappa = num / e_prev;
    std::vector<double> cur(static_cast<std::size_t>(p));
    for (int i = 1; i < p; ++i)
      cur[static_cast<std::size_t>(i - 1)] =
          prev[static_cast<std::size_t>(i - 1)] - kappa * prev[static_cast<std::size_t>(p - i - 1)];
    cur.back() = kappa;
    out.phi.push_back(std::move(cur));
    out.variance.push_back(e_prev * (1.0 - kappa * kappa));
    out.reflection.push_back(kappa);
  }
  return out;
}

bool ARModel::stationary() const {
  if (order == 0) return true;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(order, order);
  for (int i = 0; i < order; ++i) companion(0, i) = phi[static_cast<std::size_t>(i)];
  for (int i = 1; i < order; ++i) companion(i, i - 1) = 1.0;
  const Eigen::VectorXcd eig = companion.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i)
    if (std::abs(eig[i]) >= 1.0) return false;
  return true;
}

double ARModel::theoretical_lag1() const {
  if (order == 0) return 0.0;
  // rho_k - sum_i phi_i rho_|k-i| = 0 for k = 1..p with rho_0 = 1
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(order, order);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(order);
  for (int k = 1; k <= order; ++k)
    for (int i = 1; i <= order; ++i) {
      const int lag = std::abs(k - i);
      const double f = phi[static_cast<std::size_t>(i - 1)];
      if (lag == 0)
        b(k - 1) += f;
      else
        a(k - 1, lag - 1) -= f;
    }
  return a.partialPivLu().solve(b)(0);
}

double ARModel::to_standard(double x, std::size_t phase) const {
  const std::size_t h = phase % period();
  return (to_normal(marginal, x) - level[h]) / scale[h];
}

double ARModel::from_standard(double y, std::size_t phase, double shift) const {
  const std::size_t h = phase % period();
  return from_normal(marginal, level[h] + scale[h] * (y + shift));
}

bool operator==(const ARModel& a, const ARModel& b) {
  return a.variable == b.variable && a.order == b.order && a.phi == b.phi && a.sigma == b.sigma &&
         a.level == b.level && a.scale == b.scale && a.marginal == b.marginal && a.aic == b.aic && a.n == b.n;
}

ARModel fit_ar(std::span<const double> values, const ARFitOptions& options) {
  if (options.max_order < 0 || options.max_order > 3) throw PreconditionError("AR order must lie in [0, 3]");
  if (options.period != 1 && options.period != 24) throw PreconditionError("AR period must be 1 or 24");
  std::vector<double> present;
  for (double v : values)
    if (!is_missing(v)) present.push_back(v);
  if (present.size() < 200)
    throw DataError("AR fit needs at least 200 values, got " + std::to_string(present.size()));

  ARModel m;
  m.variable = options.variable;
  m.marginal = options.empirical_score ? Marginal(normal_score(present).map) : options.marginal;

  const std::size_t period = options.period;
  std::vector<double> z(values.size());
  std::vector<double> sum(period, 0.0), sumsq(period, 0.0);
  std::vector<std::size_t> count(period, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (is_missing(values[i])) {
      z[i] = kMissing;
      continue;
    }
    z[i] = to_normal(m.marginal, values[i]);
    const std::size_t h = (options.start_phase + i) % period;
    sum[h] += z[i];
    ++count[h];
  }
  m.level.assign(period, 0.0);
  m.scale.assign(period, 1.0);
  for (std::size_t h = 0; h < period; ++h) {
    if (count[h] == 0) throw DataError("AR fit: no values at phase " + std::to_string(h));
    m.level[h] = sum[h] / static_cast<double>(count[h]);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (is_missing(z[i])) continue;
    const std::size_t h = (options.start_phase + i) % period;
    sumsq[h] += (z[i] - m.level[h]) * (z[i] - m.level[h]);
  }
  for (std::size_t h = 0; h < period; ++h) {
    const double sd = std::sqrt(sumsq[h] / static_cast<double>(count[h]));
    if (!(sd > 1e-12)) throw DataError("AR fit: constant series" + (period > 1 ? " at hour " + std::to_string(h) : ""));
    m.scale[h] = sd;
  }

  std::vector<double> y(values.size());
  double var = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t h = (options.start_phase + i) % period;
    y[i] = is_missing(z[i]) ? kMissing : (z[i] - m.level[h]) / m.scale[h];
    if (!is_missing(y[i])) mean += y[i];
  }
  const double n = static_cast<double>(present.size());
  mean /= n;
  for (double v : y)
    if (!is_missing(v)) var += (v - mean) * (v - mean);
  var /= n;

  const auto acf = autocorrelation(y, options.max_order);
  const auto ld = levinson_durbin(acf, options.max_order);
  int best = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= options.max_order; ++p) {
    const double s2 = ld.variance[static_cast<std::size_t>(p)] * var;
    const double aic = n * std::log(s2) + 2.0 * p;
    if (aic < best_aic) {
      best_aic = aic;
      best = p;
    }
  }
  m.order = best;
  m.phi = ld.phi[static_cast<std::size_t>(best)];
  m.sigma = std::sqrt(ld.variance[static_cast<std::size_t>(best)] * var);
  m.aic = best_aic;
  m.n = present.size();
  if (!m.stationary()) throw NumericalError("Yule-Walker produced a non-stationary AR model");
  return m;
}

std::vector<double> simulate_standard(const ARModel& model, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t p = static_cast<std::size_t>(model.order);
  std::vector<double> history(p, 0.0);  // history[0] = most recent
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t t = 0; t < kWarmup + n; ++t) {
    double y = model.sigma * normal(rng);
    for (std::size_t i = 0; i < p; ++i) y += model.phi[i] * history[i];
    if (p > 0) {
      for (std::size_t i = p - 1; i > 0; --i) history[i] = history[i - 1];
      history[0] = y;
    }
    if (t >= kWarmup) out.push_back(y);
  }
  return out;
}

std::vector<double> simulate_ar(const ARModel& model, std::size_t n, std::uint64_t seed, double shift,
                                std::size_t start_phase) {
  auto y = simulate_standard(model, n, seed);
  for (std::size_t i = 0; i < n; ++i) y[i] = model.from_standard(y[i], start_phase + i, shift);
  return y;
}

void to_json(nlohmann::json& j, const ARModel& m) {
  j = {{"variable", m.variable}, {"order", m.order}, {"phi", m.phi},   {"sigma", m.sigma},
       {"level", m.level},       {"scale", m.scale}, {"aic", m.aic},   {"n", m.n},
       {"transform", marginal_tag(m.marginal)},      {"marginal", m.marginal}};
}

void from_json(const nlohmann::json& j, ARModel& m) {
  m.variable = j.value("variable", std::string{});
  m.order = j.at("order").get<int>();
  m.phi = j.at("phi").get<std::vector<double>>();
  m.sigma = j.at("sigma").get<double>();
  m.level = j.at("level").get<std::vector<double>>();
  m.scale = j.at("scale").get<std::vector<double>>();
  m.aic = j.value("aic", 0.0);
  m.n = j.value("n", std::size_t{0});
  m.marginal = j.at("marginal").get<Marginal>();
  if (m.order < 0 || m.order > 3 || m.phi.size() != static_cast<std::size_t>(m.order))
    throw DataError("AR entry: order and coefficient count disagree");
  if (m.level.empty() || m.level.size() != m.scale.size() || !(m.sigma >= 0.0))
    throw DataError("AR entry: inconsistent standardisation");
  if (!m.stationary()) throw DataError("AR entry is not stationary");
}

}  // namespace synthmet
