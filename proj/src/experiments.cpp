#include "fndepth/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "fndepth/depths.hpp"

namespace fndepth {
namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

Curve center_of(const ExperimentConfig& config, const Grid& grid) {
  Vector c = Vector::Constant(grid.size(), config.process.start_value);
  if (config.process.mean) c += config.process.mean->values();
  return {grid, std::move(c)};
}

double sup_distance(const Curve& a, const Curve& b) {
  return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

struct Prepared {
  Grid grid;
  MeasureWeights weights;
  KernelMatrix kernel;
};

Prepared prepare(const ExperimentConfig& config, int d) {
  Grid grid = equispaced_grid<double>(d);
  MeasureWeights weights = quadrature_weights(grid, config.scheme);
  KernelMatrix kernel = build_kernel(config.process, grid);
  return {std::move(grid), std::move(weights), std::move(kernel)};
}

nlohmann::json base_metadata(const ExperimentConfig& config, double jitter_used) {
  nlohmann::json meta;
  meta["config"] = to_json(config);
  meta["seed"] = config.seed;
  meta["version"] = std::string(kVersion);
  meta["jitter_used"] = jitter_used;
  return meta;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::InvalidValue, message);
}

}  // namespace

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::degeneracy, ExperimentKind::maximizer, ExperimentKind::breakdown,
                 ExperimentKind::consistency}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidValue, "unknown experiment '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

unsigned worker_count() {
  if (const char* env = std::getenv("FNDEPTH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

Eigen::Index contaminated_count(double fraction, Eigen::Index n) {
  return static_cast<Eigen::Index>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::degeneracy:
      c.sample_sizes = {50};
      c.grid_sizes = {5, 9, 17, 33, 65, 129};
      c.replications = 20;
      c.band_order = 3;
      c.seed = 20231;
      break;
    case ExperimentKind::maximizer:
      c.sample_sizes = {25};
      c.grid_sizes = {51};
      c.replications = 50;
      c.band_order = 2;
      c.seed = 20232;
      break;
    case ExperimentKind::breakdown:
      c.sample_sizes = {11};
      c.grid_sizes = {51};
      c.replications = 1;
      c.contamination = {5.0 / 11.0, {1e2, 1e4, 1e6}};
      c.seed = 20233;
      break;
    case ExperimentKind::consistency:
      c.process.kind = ProcessKind::fbm;
      c.process.hurst = 0.7;
      c.sample_sizes = {10, 40, 160};
      c.grid_sizes = {26, 51, 101};
      c.replications = 20;
      c.seed = 20234;
      break;
  }
  return c;
}

void validate(const ExperimentConfig& config) {
  require(!config.sample_sizes.empty(), "sample_sizes must not be empty");
  require(!config.grid_sizes.empty(), "grid_sizes must not be empty");
  require(config.replications >= 1, "replications must be positive");
  for (int n : config.sample_sizes) require(n >= 1, "sample sizes must be positive");
  for (int d : config.grid_sizes) require(d >= 1, "grid sizes must be positive");
  require(config.contamination.fraction >= 0.0 && config.contamination.fraction < 1.0,
          "contamination fraction must lie in [0, 1)");
  if (config.experiment == ExperimentKind::breakdown) {
    require(!config.contamination.magnitudes.empty(), "breakdown needs at least one magnitude");
  }
  if (config.experiment == ExperimentKind::consistency) {
    require(config.grid_sizes.size() == 1 || config.grid_sizes.size() == config.sample_sizes.size(),
            "grid_sizes must have one entry or one per sample size");
  }
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json process;
  process["kind"] = std::string(to_string(config.process.kind));
  process["hurst"] = config.process.hurst;
  process["start_value"] = config.process.start_value;
  if (config.process.mean) {
    const auto& v = config.process.mean->values();
    process["mean"] = std::vector<double>(v.begin(), v.end());
  }
  nlohmann::json j;
  j["experiment"] = std::string(to_string(config.experiment));
  j["process"] = std::move(process);
  j["sample_sizes"] = config.sample_sizes;
  j["grid_sizes"] = config.grid_sizes;
  j["replications"] = config.replications;
  j["contamination"] = {{"fraction", config.contamination.fraction},
                        {"magnitudes", config.contamination.magnitudes}};
  j["seed"] = config.seed;
  j["band_order"] = config.band_order;
  j["scheme"] = config.scheme == QuadratureScheme::trapezoid ? "trapezoid" : "uniform";
  j["solver"] = {{"tolerance", config.solver.tolerance},
                 {"max_iterations", config.solver.max_iterations},
                 {"data_point_epsilon", config.solver.data_point_epsilon}};
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c = default_config(parse_experiment_kind(j.at("experiment").get<std::string>()));
    if (j.contains("process")) {
      const auto& p = j.at("process");
      if (p.contains("kind")) {
        const auto kind = p.at("kind").get<std::string>();
        if (kind == "brownian") {
          c.process.kind = ProcessKind::brownian;
        } else if (kind == "fbm") {
          c.process.kind = ProcessKind::fbm;
        } else if (kind == "bridge") {
          c.process.kind = ProcessKind::bridge;
        } else {
          throw Error(ErrorCode::InvalidValue, "unknown process kind '" + kind + "'");
        }
      }
      c.process.hurst = p.value("hurst", c.process.hurst);
      c.process.start_value = p.value("start_value", c.process.start_value);
      if (p.contains("mean")) {
        throw Error(ErrorCode::InvalidValue, "a mean curve cannot be given in a JSON config");
      }
    }
    c.sample_sizes = j.value("sample_sizes", c.sample_sizes);
    c.grid_sizes = j.value("grid_sizes", c.grid_sizes);
    c.replications = j.value("replications", c.replications);
    if (j.contains("contamination")) {
      const auto& m = j.at("contamination");
      c.contamination.fraction = m.value("fraction", c.contamination.fraction);
      c.contamination.magnitudes = m.value("magnitudes", c.contamination.magnitudes);
    }
    c.seed = j.value("seed", c.seed);
    c.band_order = j.value("band_order", c.band_order);
    if (j.contains("scheme")) {
      const auto s = j.at("scheme").get<std::string>();
      if (s != "trapezoid" && s != "uniform") throw Error(ErrorCode::InvalidValue, "unknown scheme '" + s + "'");
      c.scheme = s == "trapezoid" ? QuadratureScheme::trapezoid : QuadratureScheme::uniform;
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      c.solver.tolerance = s.value("tolerance", c.solver.tolerance);
      c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
      c.solver.data_point_epsilon = s.value("data_point_epsilon", c.solver.data_point_epsilon);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidValue, std::string("bad experiment config: ") + e.what());
  }
}

ExperimentReport run_degeneracy(const ExperimentConfig& config) {
  validate(config);
  const int n = config.sample_sizes.front();
  if (config.band_order < 2 || config.band_order > n) {
    throw Error(ErrorCode::InvalidOrder, "band order " + std::to_string(config.band_order) +
                                             " needs 2 <= J <= n = " + std::to_string(n));
  }
  ExperimentReport report;
  report.columns = {"d", "n", "replications", "mean_bd", "mean_hrd", "se_bd", "se_hrd"};
  double jitter_used = 0.0;
  for (std::size_t g = 0; g < config.grid_sizes.size(); ++g) {
    const int d = config.grid_sizes[g];
    const Prepared prep = prepare(config, d);
    jitter_used = std::max(jitter_used, prep.kernel.jitter);
    const Curve center = center_of(config, prep.grid);
    const auto reps = static_cast<std::size_t>(config.replications);
    std::vector<double> bd(reps), hrd(reps);
    parallel_for(reps, [&](std::size_t r) {
      const FunctionalDataset data = sample_paths(prep.kernel, config.process, n, derive_seed(config.seed, g, r));
      bd[r] = band_depth(center, data, config.band_order).value;
      hrd[r] = half_region_depth(center, data).value;
    });
    report.rows.push_back({std::int64_t{d}, std::int64_t{n}, std::int64_t{config.replications}, mean_of(bd),
                           mean_of(hrd), standard_error_of(bd), standard_error_of(hrd)});
  }
  report.metadata = base_metadata(config, jitter_used);
  return report;
}

ExperimentReport run_maximizer_check(const ExperimentConfig& config) {
  validate(config);
  const int n = config.sample_sizes.front();
  const Prepared prep = prepare(config, config.grid_sizes.front());
  const double slack = 1.0 / (2.0 * n);

  struct Row {
    const char* depth;
    double at_median;
    double sample_max;
  };
  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<std::array<Row, 3>> results(reps);
  parallel_for(reps, [&](std::size_t r) {
    const FunctionalDataset data = sample_paths(prep.kernel, config.process, n, derive_seed(config.seed, 0, r));
    const Curve med = coordinatewise_median(data);
    auto mbd = [&](const Curve& x) { return modified_band_depth(x, data, prep.weights, config.band_order).value; };
    auto mhrd = [&](const Curve& x) { return modified_half_region_depth(x, data, prep.weights).value; };
    auto idd = [&](const Curve& x) { return integrated_data_depth(x, data, prep.weights).value; };
    std::array<Row, 3> rows{Row{"MBD", mbd(med), 0.0}, Row{"MHRD", mhrd(med), 0.0}, Row{"IDD", idd(med), 0.0}};
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const Curve x = data.curve(i);
      rows[0].sample_max = std::max(rows[0].sample_max, mbd(x));
      rows[1].sample_max = std::max(rows[1].sample_max, mhrd(x));
      rows[2].sample_max = std::max(rows[2].sample_max, idd(x));
    }
    results[r] = rows;
  });

  ExperimentReport report;
  report.columns = {"replication", "depth", "at_median", "sample_max", "margin", "slack", "attains"};
  for (std::size_t r = 0; r < reps; ++r) {
    for (const Row& row : results[r]) {
      const double margin = row.at_median - row.sample_max;
      report.rows.push_back({static_cast<std::int64_t>(r), std::string(row.depth), row.at_median, row.sample_max,
                             margin, slack, std::int64_t{margin >= -1e-12 ? 1 : 0}});
    }
  }
  report.metadata = base_metadata(config, prep.kernel.jitter);
  return report;
}

ExperimentReport run_breakdown(const ExperimentConfig& config) {
  validate(config);
  const int n = config.sample_sizes.front();
  const Prepared prep = prepare(config, config.grid_sizes.front());
  const Eigen::Index k = contaminated_count(config.contamination.fraction, n);
  const auto& magnitudes = config.contamination.magnitudes;
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t cells = reps * magnitudes.size();

  std::vector<double> spatial(cells), coordinate(cells);
  std::vector<int> converged(cells);
  parallel_for(reps, [&](std::size_t r) {
    const FunctionalDataset clean = sample_paths(prep.kernel, config.process, n, derive_seed(config.seed, 0, r));
    const Curve spatial_clean = spatial_median(clean, prep.weights, config.solver).first;
    const Curve coord_clean = coordinatewise_median(clean);
    for (std::size_t m = 0; m < magnitudes.size(); ++m) {
      Matrix values = clean.values();
      values.topRows(k).array() += magnitudes[m];
      const FunctionalDataset dirty(clean.grid(), std::move(values));
      const auto [spatial_dirty, solver] = spatial_median(dirty, prep.weights, config.solver);
      const std::size_t cell = r * magnitudes.size() + m;
      spatial[cell] = l2_distance(spatial_dirty, spatial_clean, prep.weights);
      coordinate[cell] = l2_distance(coordinatewise_median(dirty), coord_clean, prep.weights);
      converged[cell] = solver.converged ? 1 : 0;
    }
  });

  ExperimentReport report;
  report.columns = {"M",
                    "contaminated",
                    "n",
                    "median_displacement_spatial",
                    "mean_displacement_spatial",
                    "median_displacement_coordinatewise",
                    "mean_displacement_coordinatewise",
                    "solver_converged"};
  for (std::size_t m = 0; m < magnitudes.size(); ++m) {
    std::vector<double> s, c;
    std::int64_t ok = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      s.push_back(spatial[r * magnitudes.size() + m]);
      c.push_back(coordinate[r * magnitudes.size() + m]);
      ok += converged[r * magnitudes.size() + m];
    }
    report.rows.push_back({magnitudes[m], std::int64_t{k}, std::int64_t{n}, median_of(s), mean_of(s), median_of(c),
                           mean_of(c), ok});
  }
  report.metadata = base_metadata(config, prep.kernel.jitter);
  return report;
}

ExperimentReport run_consistency(const ExperimentConfig& config) {
  validate(config);
  ExperimentReport report;
  report.columns = {"n",
                    "d",
                    "replications",
                    "median_l2_spatial",
                    "mean_l2_spatial",
                    "median_sup_coordinatewise",
                    "mean_sup_coordinatewise",
                    "median_l2_coordinatewise",
                    "mean_l2_coordinatewise",
                    "solver_converged"};
  double jitter_used = 0.0;
  const auto reps = static_cast<std::size_t>(config.replications);
  for (std::size_t s = 0; s < config.sample_sizes.size(); ++s) {
    const int n = config.sample_sizes[s];
    const int d = config.grid_sizes.size() == 1 ? config.grid_sizes.front() : config.grid_sizes[s];
    const Prepared prep = prepare(config, d);
    jitter_used = std::max(jitter_used, prep.kernel.jitter);
    const Curve center = center_of(config, prep.grid);
    std::vector<double> l2_spatial(reps), sup_coord(reps), l2_coord(reps);
    std::vector<int> converged(reps);
    parallel_for(reps, [&](std::size_t r) {
      const FunctionalDataset data = sample_paths(prep.kernel, config.process, n, derive_seed(config.seed, s, r));
      const auto [spatial, solver] = spatial_median(data, prep.weights, config.solver);
      const Curve coord = coordinatewise_median(data);
      l2_spatial[r] = l2_distance(spatial, center, prep.weights);
      sup_coord[r] = sup_distance(coord, center);
      l2_coord[r] = l2_distance(coord, center, prep.weights);
      converged[r] = solver.converged ? 1 : 0;
    });
    report.rows.push_back({std::int64_t{n}, std::int64_t{d}, std::int64_t{config.replications}, median_of(l2_spatial),
                           mean_of(l2_spatial), median_of(sup_coord), mean_of(sup_coord), median_of(l2_coord),
                           mean_of(l2_coord),
                           static_cast<std::int64_t>(std::accumulate(converged.begin(), converged.end(), 0))});
  }
  report.metadata = base_metadata(config, jitter_used);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::degeneracy: return run_degeneracy(config);
    case ExperimentKind::maximizer: return run_maximizer_check(config);
    case ExperimentKind::breakdown: return run_breakdown(config);
    case ExperimentKind::consistency: return run_consistency(config);
  }
  throw Error(ErrorCode::InvalidValue, "unknown experiment");
}

}  // namespace fndepth
