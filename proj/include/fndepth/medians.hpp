#ifndef FNDEPTH_MEDIANS_HPP
#define FNDEPTH_MEDIANS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "fndepth/core.hpp"

namespace fndepth {

/// Per grid point: the middle order statistic for odd n, the average of the
/// two middle order statistics for even n.
template <typename Scalar>
BasicCurve<Scalar> coordinatewise_median(const BasicFunctionalDataset<Scalar>& data) {
  const Eigen::Index n = data.size();
  VectorX<Scalar> med(data.grid_size());
  std::vector<Scalar> column(static_cast<std::size_t>(n));
  const auto mid = static_cast<std::ptrdiff_t>(n / 2);
  for (Eigen::Index k = 0; k < data.grid_size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = data.values()(i, k);
    std::nth_element(column.begin(), column.begin() + mid, column.end());
    const Scalar upper = column[static_cast<std::size_t>(mid)];
    if (n % 2 == 1) {
      med[k] = upper;
    } else {
      const Scalar lower = *std::max_element(column.begin(), column.begin() + mid);
      med[k] = (lower + upper) / 2;
    }
  }
  return {data.grid(), std::move(med)};
}

namespace detail {

// Accumulator wide enough to resolve the O(step^2) objective decrease of a
// Weiszfeld step near the optimum, where double rounding would hide it.
template <typename Scalar>
using WideScalar = std::conditional_t<std::is_floating_point_v<Scalar>, long double, Scalar>;

template <typename Scalar>
WideScalar<Scalar> wide_objective(const VectorX<Scalar>& x, const MatrixX<Scalar>& data,
                                  const VectorX<Scalar>& weights) {
  using Wide = WideScalar<Scalar>;
  Wide total(0);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    Wide ss(0);
    for (Eigen::Index k = 0; k < data.cols(); ++k) {
      const Wide diff = static_cast<Wide>(x[k]) - static_cast<Wide>(data(i, k));
      ss += static_cast<Wide>(weights[k]) * diff * diff;
    }
    using std::sqrt;
    total += sqrt(ss);
  }
  return total / static_cast<Wide>(data.rows());
}

// Norm of sum_{i : ||X_i - X_j|| > eps} (X_i - X_j)/||X_i - X_j|| and the
// number of curves within eps of X_j (X_j included).
template <typename Scalar>
std::pair<Scalar, Eigen::Index> data_point_pull(const MatrixX<Scalar>& X, const VectorX<Scalar>& w, Eigen::Index j,
                                                Scalar epsilon) {
  VectorX<Scalar> pull = VectorX<Scalar>::Zero(X.cols());
  Eigen::Index multiplicity = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const VectorX<Scalar> diff = X.row(i).transpose() - X.row(j).transpose();
    const Scalar dist = weighted_norm(diff, w);
    if (dist <= epsilon) {
      ++multiplicity;
      continue;
    }
    pull += diff / dist;
  }
  return {weighted_norm(pull, w), multiplicity};
}

}  // namespace detail

/// Mean L2(Lambda) distance from x to the sample curves.
template <typename Scalar>
Scalar spatial_objective(const VectorX<Scalar>& x, const MatrixX<Scalar>& data, const VectorX<Scalar>& weights) {
  return static_cast<Scalar>(detail::wide_objective(x, data, weights));
}

template <typename Scalar>
Scalar spatial_objective(const BasicCurve<Scalar>& x, const BasicFunctionalDataset<Scalar>& data,
                         const BasicMeasureWeights<Scalar>& weights) {
  require_same_grid(x.grid(), data.grid());
  require_weights_fit(data.grid(), weights);
  return spatial_objective(x.values(), data.values(), weights.values());
}

template <typename Scalar>
struct BasicSolverConfig {
  Scalar tolerance{1e-8};
  int max_iterations = 10'000;
  Scalar data_point_epsilon{1e-12};
};

template <typename Scalar>
struct BasicSolverReport {
  int iterations = 0;
  Scalar final_objective{0};
  // n^-1 || sum over non-coincident i of (x - X_i)/||x - X_i|| ||
  Scalar gradient_norm{0};
  bool converged = false;
  std::optional<Eigen::Index> anchored_at_data_point;
  // Objective at the starting point and after every accepted step.
  std::vector<Scalar> objective_trace;
};

/// Empirical spatial median by Weiszfeld iteration in L2(Lambda), started at
/// the coordinatewise median. When an iterate reaches a sample curve X_j
/// (multiplicity m) the subgradient test ||sum_{i != j} (X_i - X_j)/||X_i - X_j|| || <= m
/// decides optimality; otherwise the modified step of Vardi and Zhang moves
/// it off the data point. Iterates are convex combinations of the current
/// point and the data, so they stay in the pointwise range of the sample.
template <typename Scalar>
std::pair<BasicCurve<Scalar>, BasicSolverReport<Scalar>> spatial_median(
    const BasicFunctionalDataset<Scalar>& data, const BasicMeasureWeights<Scalar>& weights,
    const BasicSolverConfig<Scalar>& config = {}) {
  require_weights_fit(data.grid(), weights);
  if (!(config.tolerance > Scalar(0)) || config.max_iterations < 1 || config.data_point_epsilon < Scalar(0)) {
    throw Error(ErrorCode::InvalidValue, "solver needs tolerance > 0, max_iterations >= 1, epsilon >= 0");
  }
  const MatrixX<Scalar>& X = data.values();
  const VectorX<Scalar>& w = weights.values();
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const auto n_scalar = static_cast<Scalar>(n);

  BasicSolverReport<Scalar> report;
  VectorX<Scalar> x = coordinatewise_median(data).values();
  auto objective = detail::wide_objective(x, X, w);
  report.objective_trace.push_back(static_cast<Scalar>(objective));

  VectorX<Scalar> dist(n);
  VectorX<Scalar> pull(d);
  VectorX<Scalar> weighted_sum(d);
  for (int iter = 0;; ++iter) {
    Eigen::Index coincident = 0;
    Eigen::Index first_coincident = -1;
    Scalar inverse_sum(0);
    pull.setZero();
    weighted_sum.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      dist[i] = weighted_norm(x - X.row(i).transpose(), w);
      if (dist[i] <= config.data_point_epsilon) {
        if (coincident++ == 0) first_coincident = i;
        continue;
      }
      const Scalar inv = Scalar(1) / dist[i];
      pull += (X.row(i).transpose() - x) * inv;
      weighted_sum += X.row(i).transpose() * inv;
      inverse_sum += inv;
    }
    const Scalar pull_norm = weighted_norm(pull, w);
    report.gradient_norm = pull_norm / n_scalar;
    report.iterations = iter;

    if (coincident > 0 && pull_norm <= static_cast<Scalar>(coincident)) {
      x = X.row(first_coincident).transpose();
      report.anchored_at_data_point = first_coincident;
      report.converged = true;
      break;
    }
    if (report.gradient_norm <= config.tolerance) {
      report.converged = true;
      break;
    }
    // Iterates creep toward an optimal data point only sublinearly, so the
    // nearest sample curve is tested directly.
    if (coincident == 0) {
      Eigen::Index nearest = 0;
      dist.minCoeff(&nearest);
      const auto [nearest_pull, multiplicity] = detail::data_point_pull(X, w, nearest, config.data_point_epsilon);
      if (nearest_pull <= static_cast<Scalar>(multiplicity)) {
        x = X.row(nearest).transpose();
        report.gradient_norm = nearest_pull / n_scalar;
        report.anchored_at_data_point = nearest;
        report.converged = true;
        break;
      }
    }
    if (iter >= config.max_iterations) break;

    VectorX<Scalar> candidate = weighted_sum / inverse_sum;
    if (coincident > 0) {
      const Scalar ratio = static_cast<Scalar>(coincident) / pull_norm;
      candidate = (Scalar(1) - ratio) * candidate + ratio * x;
    }
    const auto candidate_objective = detail::wide_objective(candidate, X, w);
    // Only rounding can make a Weiszfeld step ascend; stop at the better point.
    if (!(candidate_objective <= objective) || candidate == x) break;
    x = std::move(candidate);
    objective = candidate_objective;
    report.objective_trace.push_back(static_cast<Scalar>(objective));
  }
  report.final_objective = spatial_objective(x, X, w);
  return {BasicCurve<Scalar>(data.grid(), std::move(x)), std::move(report)};
}

using SolverConfig = BasicSolverConfig<double>;
using SolverReport = BasicSolverReport<double>;

}  // namespace fndepth

#endif  // FNDEPTH_MEDIANS_HPP
