#include "fndepth/simulate.hpp"

#include <cmath>
#include <random>
#include <string>

namespace fndepth {
namespace {

void validate(const GPSpec& spec, const Grid& grid) {
  if (spec.kind == ProcessKind::fbm && !(spec.hurst > 0.0 && spec.hurst < 1.0)) {
    throw Error(ErrorCode::InvalidHurst, "Hurst index must lie in (0, 1), got " + std::to_string(spec.hurst));
  }
  if (grid.lower() < 0.0) throw Error(ErrorCode::InvalidDomain, "process index must be nonnegative");
  if (spec.kind == ProcessKind::bridge && grid.upper() > 1.0) {
    throw Error(ErrorCode::InvalidDomain, "Brownian bridge lives on [0, 1]");
  }
  if (spec.mean && !(spec.mean->grid() == grid)) {
    throw Error(ErrorCode::GridMismatch, "mean curve is not on the simulation grid");
  }
  if (!std::isfinite(spec.start_value)) throw Error(ErrorCode::InvalidValue, "start value must be finite");
}

std::uint32_t low(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t high(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

double covariance(const GPSpec& spec, double t, double s) {
  switch (spec.kind) {
    case ProcessKind::brownian:
      return std::min(t, s);
    case ProcessKind::bridge:
      return std::min(t, s) - t * s;
    case ProcessKind::fbm: {
      const double h2 = 2.0 * spec.hurst;
      return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
    }
  }
  return 0.0;
}

KernelMatrix build_kernel(const GPSpec& spec, const Grid& grid) {
  validate(spec, grid);
  const Eigen::Index d = grid.size();
  Matrix entries(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      entries(a, b) = covariance(spec, grid[a], grid[b]);
      entries(b, a) = entries(a, b);
    }
  }

  KernelMatrix kernel{grid, entries, 0.0, Matrix()};
  double jitter = 0.0;
  for (;;) {
    Eigen::LLT<Matrix> llt(entries + jitter * Matrix::Identity(d, d));
    if (llt.info() == Eigen::Success) {
      kernel.jitter = jitter;
      kernel.factor = llt.matrixL();
      return kernel;
    }
    const double next = jitter == 0.0 ? 1e-12 : jitter * 10.0;
    if (next > kMaxJitter * 1.000001) break;
    jitter = next;
  }
  kernel.jitter = kMaxJitter;
  return kernel;
}

FunctionalDataset sample_paths(const KernelMatrix& kernel, const GPSpec& spec, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::EmptyDataset, "need at least one path");
  if (kernel.factor.size() == 0) {
    throw Error(ErrorCode::NotPositiveSemidefinite, "kernel not factorizable with jitter up to 1e-6");
  }
  validate(spec, kernel.grid);
  const Eigen::Index d = kernel.grid.size();
  Vector center = Vector::Constant(d, spec.start_value);
  if (spec.mean) center += spec.mean->values();

  Matrix paths(n, d);
  Vector z(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    std::seed_seq key{low(seed), high(seed), low(index), high(index)};
    std::mt19937_64 engine(key);
    std::normal_distribution<double> normal;
    for (Eigen::Index k = 0; k < d; ++k) z[k] = normal(engine);
    paths.row(i) = (center + kernel.factor.triangularView<Eigen::Lower>() * z).transpose();
  }
  return {kernel.grid, std::move(paths)};
}

FunctionalDataset simulate(const GPSpec& spec, const Grid& grid, Eigen::Index n, std::uint64_t seed,
                           double* jitter_used) {
  const KernelMatrix kernel = build_kernel(spec, grid);
  if (jitter_used != nullptr) *jitter_used = kernel.jitter;
  return sample_paths(kernel, spec, n, seed);
}

}  // namespace fndepth
