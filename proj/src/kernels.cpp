#include "synthmet/kernels.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#include "synthmet/error.hpp"
#include "synthmet/psychro.hpp"

namespace synthmet {

namespace {

constexpr std::size_t kChunk = 32;

/// Adds one row's contribution to grad; returns its squared error.
double accumulate_row(const Network& net, const double* x, const double* y, double scale, double* grad,
                      std::vector<double>& hidden, std::vector<double>& delta) {
  const double* p = net.params.data();
  for (std::size_t h = 0; h < net.hidden; ++h) {
    double a = p[net.b1() + h];
    const double* w = p + net.w1() + h * net.inputs;
    for (std::size_t i = 0; i < net.inputs; ++i) a += w[i] * x[i];
    hidden[h] = std::tanh(a);
  }
  double sq = 0.0;
  for (std::size_t o = 0; o < net.outputs; ++o) {
    double out = p[net.b2() + o];
    const double* w = p + net.w2() + o * net.hidden;
    for (std::size_t h = 0; h < net.hidden; ++h) out += w[h] * hidden[h];
    const double err = out - y[o];
    sq += err * err;
    delta[o] = 2.0 * err * scale;
  }
  for (std::size_t o = 0; o < net.outputs; ++o) {
    grad[net.b2() + o] += delta[o];
    double* g = grad + net.w2() + o * net.hidden;
    for (std::size_t h = 0; h < net.hidden; ++h) g[h] += delta[o] * hidden[h];
  }
  for (std::size_t h = 0; h < net.hidden; ++h) {
    double back = 0.0;
    for (std::size_t o = 0; o < net.outputs; ++o) back += p[net.w2() + o * net.hidden + h] * delta[o];
    const double da = back * (1.0 - hidden[h] * hidden[h]);
    grad[net.b1() + h] += da;
    double* g = grad + net.w1() + h * net.inputs;
    for (std::size_t i = 0; i < net.inputs; ++i) g[i] += da * x[i];
  }
  return sq;
}

void check_shapes(const Network& net, const RowMatrix& x, const RowMatrix& y, std::span<double> grad) {
  if (static_cast<std::size_t>(x.cols()) != net.inputs || static_cast<std::size_t>(y.cols()) != net.outputs ||
      x.rows() != y.rows() || grad.size() != net.params.size())
    throw PreconditionError("mlp gradient: shape mismatch");
}

bool before(double c1, std::size_t i1, std::size_t j1, double c2, std::size_t i2, std::size_t j2) {
  return std::tie(c1, i1, j1) < std::tie(c2, i2, j2);
}

void psychro_one(double t, double rh, double pressure, PsychroColumns& c, std::size_t k) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (std::isnan(t) || std::isnan(rh) || t < -40.0 || t > 60.0 || rh < 0.0 || rh > 100.0) {
    c.vapor_pressure[k] = c.humidity_ratio[k] = c.dew_point[k] = c.enthalpy[k] = nan;
    return;
  }
  const double e = rh / 100.0 * saturation_vapor_pressure(t);
  const double w = humidity_ratio(e, pressure);
  c.vapor_pressure[k] = e;
  c.humidity_ratio[k] = w;
  c.dew_point[k] = e > 0.0 ? dew_point_from_vapor(e) : nan;
  c.enthalpy[k] = enthalpy(t, w);
}

PsychroColumns make_columns(std::size_t n, double pressure) {
  // every in-domain vapour pressure stays below es(60 C)
  if (!(pressure > saturation_vapor_pressure(60.0))) throw PreconditionError("pressure too low for psychrometrics");
  PsychroColumns c;
  c.vapor_pressure.resize(n);
  c.humidity_ratio.resize(n);
  c.dew_point.resize(n);
  c.enthalpy.resize(n);
  return c;
}

}  // namespace

namespace serial {

Eigen::MatrixXd pairwise_sq_distances(const RowMatrix& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (points.row(i) - points.row(j)).squaredNorm();
  return d;
}

ClosestPair closest_active_pair(const Eigen::MatrixXd& cost, std::span<const char> active) {
  ClosestPair best{0, 0, std::numeric_limits<double>::infinity()};
  bool found = false;
  const std::size_t n = active.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!active[j]) continue;
      const double c = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (!found || before(c, i, j, best.cost, best.i, best.j)) {
        best = {i, j, c};
        found = true;
      }
    }
  }
  if (!found) throw PreconditionError("closest pair needs two active clusters");
  return best;
}

double mlp_gradient(const Network& net, const RowMatrix& x, const RowMatrix& y, std::span<const std::size_t> rows,
                    std::span<double> grad) {
  check_shapes(net, x, y, grad);
  std::fill(grad.begin(), grad.end(), 0.0);
  if (rows.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(rows.size() * net.outputs);
  std::vector<double> hidden(net.hidden), delta(net.outputs);
  double sq = 0.0;
  for (std::size_t r : rows)
    sq += accumulate_row(net, x.row(static_cast<Eigen::Index>(r)).data(), y.row(static_cast<Eigen::Index>(r)).data(),
                         scale, grad.data(), hidden, delta);
  return sq * scale;
}

PsychroColumns psychro_columns(std::span<const double> temp, std::span<const double> rh, double pressure) {
  if (temp.size() != rh.size()) throw PreconditionError("psychrometric columns differ in length");
  auto c = make_columns(temp.size(), pressure);
  for (std::size_t k = 0; k < temp.size(); ++k) psychro_one(temp[k], rh[k], pressure, c, k);
  return c;
}

}  // namespace serial

namespace parallel {

Eigen::MatrixXd pairwise_sq_distances(const RowMatrix& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) d(i, j) = (points.row(i) - points.row(j)).squaredNorm();
  return d;
}

ClosestPair closest_active_pair(const Eigen::MatrixXd& cost, std::span<const char> active) {
  const std::size_t n = active.size();
  ClosestPair best{0, 0, std::numeric_limits<double>::infinity()};
  bool found = false;
#pragma omp parallel
  {
    ClosestPair local{0, 0, std::numeric_limits<double>::infinity()};
    bool local_found = false;
#pragma omp for schedule(static) nowait
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double c = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (!local_found || before(c, i, j, local.cost, local.i, local.j)) {
          local = {i, j, c};
          local_found = true;
        }
      }
    }
#pragma omp critical
    if (local_found && (!found || before(local.cost, local.i, local.j, best.cost, best.i, best.j))) {
      best = local;
      found = true;
    }
  }
  if (!found) throw PreconditionError("closest pair needs two active clusters");
  return best;
}

double mlp_gradient(const Network& net, const RowMatrix& x, const RowMatrix& y, std::span<const std::size_t> rows,
                    std::span<double> grad) {
  check_shapes(net, x, y, grad);
  std::fill(grad.begin(), grad.end(), 0.0);
  if (rows.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(rows.size() * net.outputs);
  const std::size_t chunks = (rows.size() + kChunk - 1) / kChunk;
  const std::size_t np = net.params.size();
  std::vector<double> partial(chunks * np, 0.0);
  std::vector<double> sq(chunks, 0.0);
#pragma omp parallel
  {
    std::vector<double> hidden(net.hidden), delta(net.outputs);
#pragma omp for schedule(static)
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t end = std::min(rows.size(), (c + 1) * kChunk);
      for (std::size_t k = c * kChunk; k < end; ++k) {
        const auto r = static_cast<Eigen::Index>(rows[k]);
        sq[c] += accumulate_row(net, x.row(r).data(), y.row(r).data(), scale, partial.data() + c * np, hidden, delta);
      }
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += sq[c];
    for (std::size_t k = 0; k < np; ++k) grad[k] += partial[c * np + k];
  }
  return total * scale;
}

PsychroColumns psychro_columns(std::span<const double> temp, std::span<const double> rh, double pressure) {
  if (temp.size() != rh.size()) throw PreconditionError("psychrometric columns differ in length");
  auto c = make_columns(temp.size(), pressure);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(temp.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    psychro_one(temp[static_cast<std::size_t>(k)], rh[static_cast<std::size_t>(k)], pressure, c,
                static_cast<std::size_t>(k));
  return c;
}

}  // namespace parallel

}  // namespace synthmet
