// Test-only helpers: random instance generators and brute-force oracles that
// share no code path with the library implementations they check.
#ifndef FNDEPTH_TESTS_SUPPORT_HPP
#define FNDEPTH_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "fndepth/core.hpp"

namespace fndepth::testing {

/// Dataset of constant curves, one per level, on the given grid.
inline FunctionalDataset constants(const std::vector<double>& levels, const Grid& grid) {
  Matrix m(static_cast<Eigen::Index>(levels.size()), grid.size());
  for (std::size_t i = 0; i < levels.size(); ++i) m.row(static_cast<Eigen::Index>(i)).setConstant(levels[i]);
  return {grid, std::move(m)};
}

inline Curve constant_curve(double level, const Grid& grid) { return {grid, Vector::Constant(grid.size(), level)}; }

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// d distinct sorted points in [0, 1] with random spacing.
  Grid grid(int d) {
    std::vector<double> pts;
    while (static_cast<int>(pts.size()) < d) {
      const double t = uniform();
      if (std::find(pts.begin(), pts.end(), t) == pts.end()) pts.push_back(t);
    }
    return make_grid(pts);
  }

  /// Continuous values; ties have probability zero.
  FunctionalDataset dataset(int n, const Grid& grid, double scale = 1.0) {
    Matrix m(n, grid.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = scale * normal();
    return {grid, std::move(m)};
  }

  Curve curve(const Grid& grid, double scale = 1.0) {
    Vector v(grid.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = scale * normal();
    return {grid, std::move(v)};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Band depth by listing every subset of {0..n-1} as a bitmask.
inline double band_depth_by_subsets(const Curve& x, const FunctionalDataset& data, int J) {
  const int n = static_cast<int>(data.size());
  std::vector<double> hits(static_cast<std::size_t>(J) + 1, 0.0), totals(static_cast<std::size_t>(J) + 1, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size < 2 || size > J) continue;
    totals[static_cast<std::size_t>(size)] += 1.0;
    bool inside = true;
    for (Eigen::Index k = 0; k < data.grid_size() && inside; ++k) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int i = 0; i < n; ++i) {
        if ((mask >> i) & 1u) {
          lo = std::min(lo, data.values()(i, k));
          hi = std::max(hi, data.values()(i, k));
        }
      }
      inside = lo <= x[k] && x[k] <= hi;
    }
    if (inside) hits[static_cast<std::size_t>(size)] += 1.0;
  }
  double value = 0.0;
  for (int j = 2; j <= J; ++j) value += hits[static_cast<std::size_t>(j)] / totals[static_cast<std::size_t>(j)];
  return value;
}

/// Modified band depth by visiting every ordered j-tuple of sample indices
/// (repetition allowed), scoring the weighted fraction of grid points where
/// the tuple's band covers x, and averaging over the n^j tuples.
inline double modified_band_depth_by_tuples(const Curve& x, const FunctionalDataset& data, const MeasureWeights& w,
                                            int J) {
  const int n = static_cast<int>(data.size());
  double value = 0.0;
  for (int j = 2; j <= J; ++j) {
    std::vector<int> tuple(static_cast<std::size_t>(j), 0);
    double total = 0.0;
    double count = 0.0;
    for (;;) {
      double covered = 0.0;
      for (Eigen::Index k = 0; k < data.grid_size(); ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int i : tuple) {
          lo = std::min(lo, data.values()(i, k));
          hi = std::max(hi, data.values()(i, k));
        }
        if (lo <= x[k] && x[k] <= hi) covered += w[k];
      }
      total += covered;
      count += 1.0;
      int pos = 0;
      while (pos < j && ++tuple[static_cast<std::size_t>(pos)] == n) tuple[static_cast<std::size_t>(pos++)] = 0;
      if (pos == j) break;
    }
    value += total / count;
  }
  return value;
}

/// Minimum of the mean distance over hull points sum_i a_i X_i with the
/// coefficients on the simplex lattice of spacing 1/steps.
inline double spatial_objective_by_simplex_search(const FunctionalDataset& data, const MeasureWeights& w, int steps) {
  const int n = static_cast<int>(data.size());
  const Eigen::Index d = data.grid_size();
  std::vector<int> parts(static_cast<std::size_t>(n), 0);
  std::vector<double> point(static_cast<std::size_t>(d), 0.0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int)> visit = [&](int index, int remaining) {
    if (index == n - 1) {
      parts[static_cast<std::size_t>(index)] = remaining;
      for (Eigen::Index k = 0; k < d; ++k) {
        double p = 0.0;
        for (int m = 0; m < n; ++m) p += parts[static_cast<std::size_t>(m)] * data.values()(m, k);
        point[static_cast<std::size_t>(k)] = p / steps;
      }
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        double ss = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          const double diff = point[static_cast<std::size_t>(k)] - data.values()(i, k);
          ss += w[k] * diff * diff;
        }
        total += std::sqrt(ss);
      }
      best = std::min(best, total / n);
      return;
    }
    for (int a = 0; a <= remaining; ++a) {
      parts[static_cast<std::size_t>(index)] = a;
      visit(index + 1, remaining - a);
    }
  };
  visit(0, steps);
  return best;
}

/// Covariance entries straight from the formulas.
inline double fbm_covariance(double hurst, double t, double s) {
  return 0.5 * (std::pow(t, 2 * hurst) + std::pow(s, 2 * hurst) - std::pow(std::fabs(t - s), 2 * hurst));
}

}  // namespace fndepth::testing

#endif  // FNDEPTH_TESTS_SUPPORT_HPP
