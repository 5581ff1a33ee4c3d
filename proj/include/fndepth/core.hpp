#ifndef FNDEPTH_CORE_HPP
#define FNDEPTH_CORE_HPP

// Grids, the discretized index measure, and L2 geometry for curves sampled on
// a common grid. Everything here is header-only and templated on the scalar
// type; the double instantiations are aliased at the bottom of the file.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "fndepth/error.hpp"

namespace fndepth {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Sorted, duplicate-free evaluation points t_1 < ... < t_d of a compact
/// interval. Copies share the underlying storage.
template <typename Scalar>
class BasicGrid {
 public:
  using Vector = VectorX<Scalar>;

  /// Sorts the points; throws on duplicates, non-finite entries or empty input.
  explicit BasicGrid(Vector points) {
    if (points.size() == 0) {
      throw Error(ErrorCode::InvalidValue, "grid must contain at least one point");
    }
    for (Eigen::Index k = 0; k < points.size(); ++k) {
      if (!std::isfinite(points[k])) {
        throw Error(ErrorCode::InvalidValue, "grid point " + std::to_string(k) + " is not finite");
      }
    }
    std::sort(points.data(), points.data() + points.size());
    for (Eigen::Index k = 1; k < points.size(); ++k) {
      if (points[k] == points[k - 1]) {
        throw Error(ErrorCode::DuplicateGridPoint,
                    "grid point " + std::to_string(static_cast<double>(points[k])) + " repeated");
      }
    }
    points_ = std::make_shared<const Vector>(std::move(points));
  }

  const Vector& points() const noexcept { return *points_; }
  Eigen::Index size() const noexcept { return points_->size(); }
  Scalar operator[](Eigen::Index k) const { return (*points_)[k]; }
  Scalar lower() const { return (*points_)[0]; }
  Scalar upper() const { return (*points_)[size() - 1]; }

  friend bool operator==(const BasicGrid& a, const BasicGrid& b) {
    return a.points_ == b.points_ ||
           (a.size() == b.size() && (a.points().array() == b.points().array()).all());
  }

 private:
  std::shared_ptr<const Vector> points_;
};

template <typename Scalar>
BasicGrid<Scalar> make_grid(const std::vector<Scalar>& points) {
  return BasicGrid<Scalar>(Eigen::Map<const VectorX<Scalar>>(points.data(),
                                                            static_cast<Eigen::Index>(points.size())));
}

/// d equispaced points on [a, b], endpoints included. A single point sits at b.
template <typename Scalar = double>
BasicGrid<Scalar> equispaced_grid(Eigen::Index d, Scalar a = 0, Scalar b = 1) {
  if (d < 1) throw Error(ErrorCode::InvalidValue, "grid size must be positive");
  if (d == 1) return BasicGrid<Scalar>(VectorX<Scalar>::Constant(1, b));
  return BasicGrid<Scalar>(VectorX<Scalar>::LinSpaced(d, a, b));
}

enum class QuadratureScheme { trapezoid, uniform };

/// Discretization of the probability measure on the index interval: one
/// nonnegative weight per grid point, summing to one.
template <typename Scalar>
class BasicMeasureWeights {
 public:
  using Vector = VectorX<Scalar>;

  BasicMeasureWeights(Vector weights, QuadratureScheme scheme)
      : weights_(std::move(weights)), scheme_(scheme) {
    if (weights_.size() == 0) throw Error(ErrorCode::InvalidValue, "empty weight vector");
    if (!weights_.allFinite() || (weights_.array() < Scalar(0)).any()) {
      throw Error(ErrorCode::InvalidValue, "weights must be finite and nonnegative");
    }
    const Scalar tol = std::max(Scalar(1e-12), Scalar(16) * std::numeric_limits<Scalar>::epsilon());
    if (std::abs(weights_.sum() - Scalar(1)) > tol) {
      throw Error(ErrorCode::InvalidValue, "weights must sum to 1");
    }
  }

  const Vector& values() const noexcept { return weights_; }
  Eigen::Index size() const noexcept { return weights_.size(); }
  Scalar operator[](Eigen::Index k) const { return weights_[k]; }
  QuadratureScheme scheme() const noexcept { return scheme_; }

 private:
  Vector weights_;
  QuadratureScheme scheme_;
};

template <typename Scalar>
BasicMeasureWeights<Scalar> quadrature_weights(const BasicGrid<Scalar>& grid,
                                               QuadratureScheme scheme = QuadratureScheme::trapezoid) {
  const Eigen::Index d = grid.size();
  VectorX<Scalar> w(d);
  if (d == 1) {
    w[0] = Scalar(1);
    return {std::move(w), scheme};
  }
  if (scheme == QuadratureScheme::uniform) {
    w.setConstant(Scalar(1) / static_cast<Scalar>(d));
    return {std::move(w), scheme};
  }
  const auto& t = grid.points();
  w[0] = (t[1] - t[0]) / 2;
  w[d - 1] = (t[d - 1] - t[d - 2]) / 2;
  for (Eigen::Index k = 1; k + 1 < d; ++k) w[k] = (t[k + 1] - t[k - 1]) / 2;
  w /= w.sum();
  return {std::move(w), scheme};
}

/// Sum_k w_k v_k for any vector expression v.
template <typename Derived, typename Scalar>
Scalar integrate(const Eigen::MatrixBase<Derived>& values, const BasicMeasureWeights<Scalar>& weights) {
  if (values.size() != weights.size()) {
    throw Error(ErrorCode::ShapeMismatch, "integrand has " + std::to_string(values.size()) +
                                              " values, weights have " + std::to_string(weights.size()));
  }
  Scalar acc(0);
  for (Eigen::Index k = 0; k < values.size(); ++k) acc += weights[k] * values.derived().coeff(k);
  return acc;
}

/// L2(Lambda) norm of a vector expression; no shape checks.
template <typename Derived, typename Scalar>
Scalar weighted_norm(const Eigen::MatrixBase<Derived>& v, const VectorX<Scalar>& w) {
  Scalar acc(0);
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const Scalar x = v.derived().coeff(k);
    acc += w[k] * x * x;
  }
  return std::sqrt(acc);
}

/// A function sampled on a grid.
template <typename Scalar>
class BasicCurve {
 public:
  using Vector = VectorX<Scalar>;

  BasicCurve(BasicGrid<Scalar> grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw Error(ErrorCode::ShapeMismatch, "curve has " + std::to_string(values_.size()) +
                                                " values on a grid of " + std::to_string(grid_.size()));
    }
    if (!values_.allFinite()) throw Error(ErrorCode::InvalidValue, "curve values must be finite");
  }

  const BasicGrid<Scalar>& grid() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  Scalar operator[](Eigen::Index k) const { return values_[k]; }

 private:
  BasicGrid<Scalar> grid_;
  Vector values_;
};

/// n curves on a shared grid stored as an n x d matrix, row i = curve i.
template <typename Scalar>
class BasicFunctionalDataset {
 public:
  using Matrix = MatrixX<Scalar>;

  BasicFunctionalDataset(BasicGrid<Scalar> grid, Matrix curves)
      : grid_(std::move(grid)), curves_(std::move(curves)) {
    if (curves_.rows() < 1) throw Error(ErrorCode::EmptyDataset, "dataset must hold at least one curve");
    if (curves_.cols() != grid_.size()) {
      throw Error(ErrorCode::ShapeMismatch, "dataset has " + std::to_string(curves_.cols()) +
                                                " columns on a grid of " + std::to_string(grid_.size()));
    }
    if (!curves_.allFinite()) throw Error(ErrorCode::InvalidValue, "dataset values must be finite");
  }

  const BasicGrid<Scalar>& grid() const noexcept { return grid_; }
  const Matrix& values() const noexcept { return curves_; }
  Eigen::Index size() const noexcept { return curves_.rows(); }
  Eigen::Index grid_size() const noexcept { return curves_.cols(); }
  auto row(Eigen::Index i) const { return curves_.row(i); }
  BasicCurve<Scalar> curve(Eigen::Index i) const { return {grid_, curves_.row(i).transpose()}; }

 private:
  BasicGrid<Scalar> grid_;
  Matrix curves_;
};

template <typename Scalar>
void require_same_grid(const BasicGrid<Scalar>& a, const BasicGrid<Scalar>& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "curves live on different grids");
}

template <typename Scalar>
void require_weights_fit(const BasicGrid<Scalar>& grid, const BasicMeasureWeights<Scalar>& weights) {
  if (weights.size() != grid.size()) {
    throw Error(ErrorCode::ShapeMismatch, "weights do not match the grid length");
  }
}

template <typename Scalar>
Scalar l2_distance(const BasicCurve<Scalar>& a, const BasicCurve<Scalar>& b,
                   const BasicMeasureWeights<Scalar>& weights) {
  require_same_grid(a.grid(), b.grid());
  require_weights_fit(a.grid(), weights);
  return weighted_norm(a.values() - b.values(), weights.values());
}

/// Averages the curve's values at the k source points nearest to each target
/// point. Equidistant candidates resolve toward the smaller index value.
template <typename Scalar>
BasicCurve<Scalar> resample_to_grid(const BasicCurve<Scalar>& curve, const BasicGrid<Scalar>& target,
                                    Eigen::Index k) {
  const auto& source = curve.grid().points();
  const Eigen::Index d = source.size();
  if (k < 1 || k > d) {
    throw Error(ErrorCode::InvalidK, "k = " + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  VectorX<Scalar> out(target.size());
  for (Eigen::Index j = 0; j < target.size(); ++j) {
    const Scalar t = target[j];
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Source points are sorted, so index order breaks distance ties toward smaller t.
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index p, Eigen::Index q) {
      const Scalar dp = std::abs(source[p] - t);
      const Scalar dq = std::abs(source[q] - t);
      return dp < dq || (dp == dq && p < q);
    });
    Scalar acc(0);
    for (Eigen::Index m = 0; m < k; ++m) acc += curve[order[static_cast<std::size_t>(m)]];
    out[j] = acc / static_cast<Scalar>(k);
  }
  return {target, std::move(out)};
}

/// Order counts of a sample column relative to a value x: the empirical
/// distribution function at x is (below + equal)/n and its left limit below/n.
struct MarginalCounts {
  Eigen::Index n_below = 0;
  Eigen::Index n_equal = 0;
  Eigen::Index n_total = 0;

  double cdf() const { return static_cast<double>(n_below + n_equal) / static_cast<double>(n_total); }
  double cdf_left() const { return static_cast<double>(n_below) / static_cast<double>(n_total); }
};

template <typename Derived>
MarginalCounts marginal_counts(const Eigen::MatrixBase<Derived>& sample, typename Derived::Scalar x) {
  MarginalCounts c;
  c.n_total = sample.size();
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    const auto v = sample.derived().coeff(i);
    if (v < x) {
      ++c.n_below;
    } else if (v == x) {
      ++c.n_equal;
    }
  }
  return c;
}

using Grid = BasicGrid<double>;
using MeasureWeights = BasicMeasureWeights<double>;
using Curve = BasicCurve<double>;
using FunctionalDataset = BasicFunctionalDataset<double>;
using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

}  // namespace fndepth

#endif  // FNDEPTH_CORE_HPP
