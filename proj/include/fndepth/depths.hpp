#ifndef FNDEPTH_DEPTHS_HPP
#define FNDEPTH_DEPTHS_HPP

// Empirical functional depths of a query curve relative to a sample of curves.
//
// Band and half-region depths use inclusive comparisons. The band depth
// enumerates subsets of distinct sample curves. The modified band and
// half-region depths are evaluated from the marginal empirical distribution
// functions, which corresponds to sampling curves with replacement, so the two
// families do not agree on ties at small n.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fndepth/core.hpp"

namespace fndepth {

enum class DepthFamily { BD, HRD, MBD, MHRD, IDD, SD, SD_VZ };

constexpr std::string_view to_string(DepthFamily f) {
  switch (f) {
    case DepthFamily::BD: return "BD";
    case DepthFamily::HRD: return "HRD";
    case DepthFamily::MBD: return "MBD";
    case DepthFamily::MHRD: return "MHRD";
    case DepthFamily::IDD: return "IDD";
    case DepthFamily::SD: return "SD";
    case DepthFamily::SD_VZ: return "SD_VZ";
  }
  return "?";
}

template <typename Scalar>
struct BasicDepthResult {
  Scalar value{0};
  DepthFamily family = DepthFamily::BD;
  std::optional<int> order_J;
  // Set only when the band depth was estimated by subset sampling.
  std::optional<Scalar> standard_error;
};

enum class UnivariateDepth { halfspace, simplicial };
enum class SpatialConvention { standard, vz };

/// Controls for the band depth. Subsets are enumerated exactly while the total
/// number of j-subsets (j = 2..J) stays within exact_subset_limit; beyond it a
/// fixed number of uniformly drawn subsets per order is used.
struct BandDepthOptions {
  double exact_subset_limit = 5.0e6;
  std::size_t samples_per_order = 200'000;
  std::uint64_t seed = 0x5eed;
};

namespace detail {

inline double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

template <typename Scalar>
void check_query(const BasicCurve<Scalar>& x, const BasicFunctionalDataset<Scalar>& data) {
  require_same_grid(x.grid(), data.grid());
}

inline void check_order(int J, Eigen::Index n, bool bounded_by_n) {
  if (J < 2) throw Error(ErrorCode::InvalidOrder, "band order J must be at least 2, got " + std::to_string(J));
  if (bounded_by_n && J > n) {
    throw Error(ErrorCode::InvalidOrder,
                "band order J = " + std::to_string(J) + " exceeds sample size " + std::to_string(n));
  }
}

// Per-curve bitsets over grid points: where the curve is <= x and where it is >= x.
struct CoverMasks {
  std::size_t words = 0;
  std::vector<std::uint64_t> below;
  std::vector<std::uint64_t> above;
  std::vector<std::uint64_t> full;

  const std::uint64_t* below_of(Eigen::Index i) const { return below.data() + static_cast<std::size_t>(i) * words; }
  const std::uint64_t* above_of(Eigen::Index i) const { return above.data() + static_cast<std::size_t>(i) * words; }
};

template <typename Scalar>
CoverMasks cover_masks(const BasicCurve<Scalar>& x, const BasicFunctionalDataset<Scalar>& data) {
  const Eigen::Index n = data.size();
  const Eigen::Index d = data.grid_size();
  CoverMasks m;
  m.words = static_cast<std::size_t>((d + 63) / 64);
  m.below.assign(m.words * static_cast<std::size_t>(n), 0);
  m.above.assign(m.words * static_cast<std::size_t>(n), 0);
  m.full.assign(m.words, 0);
  for (Eigen::Index k = 0; k < d; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << (k % 64);
    const auto w = static_cast<std::size_t>(k / 64);
    m.full[w] |= bit;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar v = data.values()(i, k);
      if (v <= x[k]) m.below[static_cast<std::size_t>(i) * m.words + w] |= bit;
      if (v >= x[k]) m.above[static_cast<std::size_t>(i) * m.words + w] |= bit;
    }
  }
  return m;
}

// Depth-first enumeration of index subsets in increasing order, carrying the
// union of the cover masks. counts[m] accumulates covering subsets of size m.
class SubsetCounter {
 public:
  SubsetCounter(const CoverMasks& masks, Eigen::Index n, int max_size)
      : masks_(masks), n_(n), max_size_(max_size), counts_(static_cast<std::size_t>(max_size) + 1, 0.0),
        below_stack_(masks.words * (static_cast<std::size_t>(max_size) + 1), 0),
        above_stack_(masks.words * (static_cast<std::size_t>(max_size) + 1), 0) {}

  std::vector<double> run() {
    descend(0, 0);
    return counts_;
  }

 private:
  void descend(Eigen::Index start, int size) {
    const std::size_t w = masks_.words;
    for (Eigen::Index i = start; i < n_; ++i) {
      std::uint64_t* below = below_stack_.data() + static_cast<std::size_t>(size + 1) * w;
      std::uint64_t* above = above_stack_.data() + static_cast<std::size_t>(size + 1) * w;
      const std::uint64_t* prev_below = below_stack_.data() + static_cast<std::size_t>(size) * w;
      const std::uint64_t* prev_above = above_stack_.data() + static_cast<std::size_t>(size) * w;
      bool covered = true;
      for (std::size_t q = 0; q < w; ++q) {
        below[q] = prev_below[q] | masks_.below_of(i)[q];
        above[q] = prev_above[q] | masks_.above_of(i)[q];
        covered = covered && below[q] == masks_.full[q] && above[q] == masks_.full[q];
      }
      const int next = size + 1;
      if (covered) {
        // Every superset is covering too: count them in closed form.
        const Eigen::Index remaining = n_ - i - 1;
        for (int m = std::max(next, 2); m <= max_size_; ++m) counts_[m] += binomial(remaining, m - next);
        continue;
      }
      if (next < max_size_) descend(i + 1, next);
    }
  }

  const CoverMasks& masks_;
  Eigen::Index n_;
  int max_size_;
  std::vector<double> counts_;
  std::vector<std::uint64_t> below_stack_;
  std::vector<std::uint64_t> above_stack_;
};

}  // namespace detail

/// Band depth of order J: sum over j = 2..J of the fraction of j-subsets of
/// distinct sample curves whose pointwise envelope contains x on the whole grid.
template <typename Scalar>
BasicDepthResult<Scalar> band_depth(const BasicCurve<Scalar>& x, const BasicFunctionalDataset<Scalar>& data,
                                    int J, const BandDepthOptions& options = {}) {
  detail::check_query(x, data);
  const Eigen::Index n = data.size();
  detail::check_order(J, n, true);

  BasicDepthResult<Scalar> result;
  result.family = DepthFamily::BD;
  result.order_J = J;

  double total_subsets = 0.0;
  for (int j = 2; j <= J; ++j) total_subsets += detail::binomial(n, j);

  const detail::CoverMasks masks = detail::cover_masks(x, data);
  if (total_subsets <= options.exact_subset_limit) {
    const std::vector<double> counts = detail::SubsetCounter(masks, n, J).run();
    double value = 0.0;
    for (int j = 2; j <= J; ++j) value += counts[static_cast<std::size_t>(j)] / detail::binomial(n, j);
    result.value = static_cast<Scalar>(value);
    return result;
  }

  std::mt19937_64 rng(options.seed);
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> below(masks.words), above(masks.words);
  double value = 0.0;
  double variance = 0.0;
  const auto samples = static_cast<double>(options.samples_per_order);
  for (int j = 2; j <= J; ++j) {
    std::size_t hits = 0;
    for (std::size_t s = 0; s < options.samples_per_order; ++s) {
      std::iota(pool.begin(), pool.end(), Eigen::Index{0});
      std::fill(below.begin(), below.end(), 0);
      std::fill(above.begin(), above.end(), 0);
      for (int m = 0; m < j; ++m) {
        std::uniform_int_distribution<Eigen::Index> pick(m, n - 1);
        std::swap(pool[static_cast<std::size_t>(m)], pool[static_cast<std::size_t>(pick(rng))]);
        const Eigen::Index i = pool[static_cast<std::size_t>(m)];
        for (std::size_t q = 0; q < masks.words; ++q) {
          below[q] |= masks.below_of(i)[q];
          above[q] |= masks.above_of(i)[q];
        }
      }
      if (below == masks.full && above == masks.full) ++hits;
    }
    const double p = static_cast<double>(hits) / samples;
    value += p;
    variance += p * (1.0 - p) / samples;
  }
  result.value = static_cast<Scalar>(value);
  result.standard_error = static_cast<Scalar>(std::sqrt(variance));
  return result;
}

/// min of the fractions of sample curves lying entirely below / above x.
template <typename Scalar>
BasicDepthResult<Scalar> half_region_depth(const BasicCurve<Scalar>& x,
                                           const BasicFunctionalDataset<Scalar>& data) {
  detail::check_query(x, data);
  const auto& v = data.values();
  const auto query = x.values().transpose();
  Eigen::Index below = 0;
  Eigen::Index above = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if ((v.row(i).array() <= query.array()).all()) ++below;
    if ((v.row(i).array() >= query.array()).all()) ++above;
  }
  const auto n = static_cast<Scalar>(data.size());
  return {std::min(static_cast<Scalar>(below), static_cast<Scalar>(above)) / n, DepthFamily::HRD, {}, {}};
}

/// Sum over j = 2..J of the integral of 1 - F(x-)^j - (1 - F(x))^j, with F the
/// marginal empirical distribution function at each grid point.
template <typename Scalar>
BasicDepthResult<Scalar> modified_band_depth(const BasicCurve<Scalar>& x, const BasicFunctionalDataset<Scalar>& data,
                                             const BasicMeasureWeights<Scalar>& weights, int J) {
  detail::check_query(x, data);
  detail::check_order(J, data.size(), false);
  require_weights_fit(data.grid(), weights);
  VectorX<Scalar> integrand(data.grid_size());
  for (Eigen::Index k = 0; k < data.grid_size(); ++k) {
    const MarginalCounts c = marginal_counts(data.values().col(k), x[k]);
    const auto left = static_cast<Scalar>(c.cdf_left());
    const auto upper = Scalar(1) - static_cast<Scalar>(c.cdf());
    Scalar s(0);
    for (int j = 2; j <= J; ++j) s += Scalar(1) - std::pow(left, j) - std::pow(upper, j);
    integrand[k] = s;
  }
  return {integrate(integrand, weights), DepthFamily::MBD, J, {}};
}

/// min( integral of F(x), 1 - integral of F(x-) ).
template <typename Scalar>
BasicDepthResult<Scalar> modified_half_region_depth(const BasicCurve<Scalar>& x,
                                                    const BasicFunctionalDataset<Scalar>& data,
                                                    const BasicMeasureWeights<Scalar>& weights) {
  detail::check_query(x, data);
  require_weights_fit(data.grid(), weights);
  VectorX<Scalar> at(data.grid_size()), left(data.grid_size());
  for (Eigen::Index k = 0; k < data.grid_size(); ++k) {
    const MarginalCounts c = marginal_counts(data.values().col(k), x[k]);
    at[k] = static_cast<Scalar>(c.cdf());
    left[k] = static_cast<Scalar>(c.cdf_left());
  }
  const Scalar value = std::min(integrate(at, weights), Scalar(1) - integrate(left, weights));
  return {value, DepthFamily::MHRD, {}, {}};
}

template <typename Scalar>
BasicDepthResult<Scalar> integrated_data_depth(const BasicCurve<Scalar>& x, const BasicFunctionalDataset<Scalar>& data,
                                               const BasicMeasureWeights<Scalar>& weights,
                                               UnivariateDepth univariate = UnivariateDepth::halfspace) {
  detail::check_query(x, data);
  require_weights_fit(data.grid(), weights);
  VectorX<Scalar> pointwise(data.grid_size());
  for (Eigen::Index k = 0; k < data.grid_size(); ++k) {
    const MarginalCounts c = marginal_counts(data.values().col(k), x[k]);
    const auto at = static_cast<Scalar>(c.cdf());
    const auto upper = Scalar(1) - static_cast<Scalar>(c.cdf_left());
    pointwise[k] = univariate == UnivariateDepth::halfspace ? std::min(at, upper) : at * upper;
  }
  return {integrate(pointwise, weights), DepthFamily::IDD, {}, {}};
}

/// Norm of the averaged unit vectors (x - X_i)/||x - X_i|| over the curves
/// different from x; the divisor is always n. Also reports how many curves
/// coincide with x exactly.
template <typename Scalar>
Scalar mean_unit_vector_norm(const VectorX<Scalar>& x, const MatrixX<Scalar>& data,
                             const VectorX<Scalar>& weights, Eigen::Index* coincident = nullptr) {
  VectorX<Scalar> sum = VectorX<Scalar>::Zero(data.cols());
  Eigen::Index equal = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const VectorX<Scalar> diff = x - data.row(i).transpose();
    if ((diff.array() == Scalar(0)).all()) {
      ++equal;
      continue;
    }
    const Scalar dist = weighted_norm(diff, weights);
    // Differences invisible to the measure (zero-weight coordinates only) carry no direction.
    if (dist > Scalar(0)) sum += diff / dist;
  }
  if (coincident != nullptr) *coincident = equal;
  return weighted_norm(sum, weights) / static_cast<Scalar>(data.rows());
}

template <typename Scalar>
BasicDepthResult<Scalar> spatial_depth(const BasicCurve<Scalar>& x, const BasicFunctionalDataset<Scalar>& data,
                                       const BasicMeasureWeights<Scalar>& weights,
                                       SpatialConvention convention = SpatialConvention::standard) {
  detail::check_query(x, data);
  require_weights_fit(data.grid(), weights);
  Eigen::Index equal = 0;
  const Scalar sd = Scalar(1) - mean_unit_vector_norm(x.values(), data.values(), weights.values(), &equal);
  if (convention == SpatialConvention::standard) return {sd, DepthFamily::SD, {}, {}};
  const Scalar mass = static_cast<Scalar>(equal) / static_cast<Scalar>(data.size());
  return {Scalar(1) - std::max(Scalar(0), Scalar(1) - sd - mass), DepthFamily::SD_VZ, {}, {}};
}

using DepthResult = BasicDepthResult<double>;

}  // namespace fndepth

#endif  // FNDEPTH_DEPTHS_HPP
