#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "synthmet/mlp.hpp"

namespace synthmet {

struct ClosestPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double cost = 0.0;
};

struct PsychroColumns {
  std::vector<double> vapor_pressure;  // Pa
  std::vector<double> humidity_ratio;  // kg/kg
  std::vector<double> dew_point;       // C, NaN when RH = 0
  std::vector<double> enthalpy;        // kJ/kg
};

// Hot loops with a plain reference version and an OpenMP version. The parallel
// versions reduce in a fixed order so results do not depend on the thread count.

namespace serial {

Eigen::MatrixXd pairwise_sq_distances(const RowMatrix& points);
/// Smallest cost among active i < j; ties go to the lexicographically smallest (i, j).
ClosestPair closest_active_pair(const Eigen::MatrixXd& cost, std::span<const char> active);
/// Loss over `rows`; writes its gradient into grad (size = parameter count).
double mlp_gradient(const Network& net, const RowMatrix& x, const RowMatrix& y, std::span<const std::size_t> rows,
                    std::span<double> grad);
PsychroColumns psychro_columns(std::span<const double> temp, std::span<const double> rh, double pressure);

}  // namespace serial

namespace parallel {

Eigen::MatrixXd pairwise_sq_distances(const RowMatrix& points);
ClosestPair closest_active_pair(const Eigen::MatrixXd& cost, std::span<const char> active);
double mlp_gradient(const Network& net, const RowMatrix& x, const RowMatrix& y, std::span<const std::size_t> rows,
                    std::span<double> grad);
PsychroColumns psychro_columns(std::span<const double> temp, std::span<const double> rh, double pressure);

}  // namespace parallel

}  // namespace synthmet
