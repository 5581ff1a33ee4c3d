#ifndef FNDEPTH_EXPERIMENTS_HPP
#define FNDEPTH_EXPERIMENTS_HPP

// Monte-Carlo experiments on simulated Gaussian-process samples. Each
// returns a table with one row per parameter point; reports are a pure
// function of the configuration, including its seed.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fndepth/core.hpp"
#include "fndepth/io.hpp"
#include "fndepth/medians.hpp"
#include "fndepth/simulate.hpp"

namespace fndepth {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind { degeneracy, maximizer, breakdown, consistency };

constexpr std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::degeneracy: return "degeneracy";
    case ExperimentKind::maximizer: return "maximizer";
    case ExperimentKind::breakdown: return "breakdown";
    case ExperimentKind::consistency: return "consistency";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name);

struct Contamination {
  double fraction = 0.0;
  std::vector<double> magnitudes;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::degeneracy;
  GPSpec process;
  // Consistency pairs sample_sizes[i] with grid_sizes[i] (a single grid size is
  // shared by every n). The other experiments use sample_sizes[0] and, except
  // for degeneracy, grid_sizes[0].
  std::vector<int> sample_sizes;
  std::vector<int> grid_sizes;
  int replications = 1;
  Contamination contamination;
  std::uint64_t seed = 0;
  int band_order = 3;
  QuadratureScheme scheme = QuadratureScheme::trapezoid;
  SolverConfig solver;
};

/// The settings used by the acceptance suite for each experiment.
ExperimentConfig default_config(ExperimentKind kind);

/// Throws InvalidValue on empty lists, non-positive sizes, fraction outside [0, 1).
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys take the defaults of default_config(experiment).
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Number of contaminated curves: floor(fraction * n), robust to the rounding
/// of fractions such as 5/11.
Eigen::Index contaminated_count(double fraction, Eigen::Index n);

/// Rows (d, n, replications, mean_bd, mean_hrd, se_bd, se_hrd) for the band and
/// half-region depth of the center of symmetry on grids of growing size.
ExperimentReport run_degeneracy(const ExperimentConfig& config);

/// Rows (replication, depth, at_median, sample_max, margin, slack, attains)
/// comparing MBD, MHRD and IDD of the coordinatewise median with the best
/// sample curve.
ExperimentReport run_maximizer_check(const ExperimentConfig& config);

/// Rows (M, contaminated, spatial/coordinatewise displacement) where the first
/// floor(fraction n) curves are shifted by the constant M.
ExperimentReport run_breakdown(const ExperimentConfig& config);

/// Rows (n, d, median/mean L2 error of the spatial median, median/mean sup and
/// L2 error of the coordinatewise median) against the center of symmetry.
ExperimentReport run_consistency(const ExperimentConfig& config);

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Worker count from FNDEPTH_THREADS, else the hardware concurrency.
unsigned worker_count();

/// Runs task(i) for i in [0, count) on up to worker_count() threads; the first
/// exception thrown by any task is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

/// Independent 64-bit seed for a (base seed, stream, substream) triple.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

}  // namespace fndepth

#endif  // FNDEPTH_EXPERIMENTS_HPP
