#ifndef FNDEPTH_SIMULATE_HPP
#define FNDEPTH_SIMULATE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string_view>

#include "fndepth/core.hpp"

namespace fndepth {

enum class ProcessKind { brownian, fbm, bridge };

constexpr std::string_view to_string(ProcessKind k) {
  switch (k) {
    case ProcessKind::brownian: return "brownian";
    case ProcessKind::fbm: return "fbm";
    case ProcessKind::bridge: return "bridge";
  }
  return "?";
}

/// Gaussian process to simulate. Paths are start_value + mean(t) + a centered
/// process with the kernel selected by kind; hurst is read only for fbm.
struct GPSpec {
  ProcessKind kind = ProcessKind::brownian;
  double hurst = 0.5;
  std::optional<Curve> mean;
  double start_value = 0.0;
};

/// Covariance matrix on a grid, plus the diagonal jitter that made it
/// factorizable and the resulting lower Cholesky factor. factor is empty when
/// no jitter up to max_jitter worked.
struct KernelMatrix {
  Grid grid;
  Matrix entries;
  double jitter = 0.0;
  Matrix factor;
};

inline constexpr double kMaxJitter = 1e-6;

/// Covariance K(t, s) of the process: 0.5 (t^2H + s^2H - |t - s|^2H) for
/// fbm, min(t, s) for Brownian motion, min(t, s) - t s for the bridge.
double covariance(const GPSpec& spec, double t, double s);

KernelMatrix build_kernel(const GPSpec& spec, const Grid& grid);

/// n paths, path i drawn from its own normal stream keyed by (seed, i), so a
/// path does not depend on how many others are requested.
FunctionalDataset sample_paths(const KernelMatrix& kernel, const GPSpec& spec, Eigen::Index n, std::uint64_t seed);

/// Convenience: build_kernel + sample_paths.
FunctionalDataset simulate(const GPSpec& spec, const Grid& grid, Eigen::Index n, std::uint64_t seed,
                           double* jitter_used = nullptr);

}  // namespace fndepth

#endif  // FNDEPTH_SIMULATE_HPP
