// fndepth: functional depths, medians and the Monte-Carlo experiments from the
// command line. Exit status 0 on success, 1 on validation errors, 2 on I/O errors.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fndepth/fndepth.hpp"

namespace {

using namespace fndepth;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "Random seed");
  cmd->add_option("--out", common.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

ReportFormat report_format(const Common& common) {
  return common.format == "json" ? ReportFormat::json : ReportFormat::csv;
}

void emit(const Common& common, const std::string& text) {
  if (common.out.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::IoError, "failed writing to stdout");
  } else {
    write_text(common.out, text);
  }
}

CsvLayout parse_layout(const std::string& s) {
  return s == "cols" ? CsvLayout::cols_are_curves : CsvLayout::rows_are_curves;
}

QuadratureScheme parse_scheme(const std::string& s) {
  return s == "uniform" ? QuadratureScheme::uniform : QuadratureScheme::trapezoid;
}

ProcessKind parse_process(const std::string& s) {
  if (s == "fbm") return ProcessKind::fbm;
  if (s == "bridge") return ProcessKind::bridge;
  return ProcessKind::brownian;
}

std::string dataset_text(const FunctionalDataset& data, const std::vector<std::string>& ids, const Common& common,
                         const nlohmann::json& extra = nullptr) {
  if (common.format == "json") {
    nlohmann::json doc = dataset_to_json(data, ids);
    if (!extra.is_null()) doc["metadata"] = extra;
    return doc.dump(2) + "\n";
  }
  return format_dataset_csv(data, ids);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional data depths and deepest points"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // simulate
  Common sim_common;
  std::string sim_process = "brownian";
  double sim_hurst = 0.5;
  double sim_start = 0.0;
  int sim_n = 10;
  int sim_d = 101;
  auto* sim = app.add_subcommand("simulate", "Sample Gaussian-process paths on an equispaced grid of [0, 1]");
  add_common(sim, sim_common);
  sim->add_option("--process", sim_process)->check(CLI::IsMember({"brownian", "fbm", "bridge"}));
  sim->add_option("--hurst", sim_hurst, "Hurst index for fbm");
  sim->add_option("--start-value", sim_start);
  sim->add_option("-n,--n", sim_n, "Number of paths")->check(CLI::PositiveNumber);
  sim->add_option("-d,--grid-size", sim_d, "Grid points")->check(CLI::PositiveNumber);

  // depth
  Common depth_common;
  std::string depth_data, depth_query, depth_layout = "rows", depth_family = "mbd", depth_univariate = "halfspace",
                                       depth_scheme = "trapezoid";
  int depth_order = 2;
  auto* depth = app.add_subcommand("depth", "Depth of every query curve (default: every sample curve)");
  add_common(depth, depth_common);
  depth->add_option("--data", depth_data, "Dataset CSV")->required();
  depth->add_option("--query", depth_query, "Query curves CSV on the same grid");
  depth->add_option("--layout", depth_layout)->check(CLI::IsMember({"rows", "cols"}));
  depth->add_option("--family", depth_family)
      ->check(CLI::IsMember({"bd", "hrd", "mbd", "mhrd", "idd", "sd", "sd-vz"}));
  depth->add_option("-J,--order", depth_order, "Band order J");
  depth->add_option("--univariate", depth_univariate)->check(CLI::IsMember({"halfspace", "simplicial"}));
  depth->add_option("--scheme", depth_scheme)->check(CLI::IsMember({"trapezoid", "uniform"}));

  // median
  Common median_common;
  std::string median_data, median_layout = "rows", median_kind = "both", median_scheme = "trapezoid";
  SolverConfig solver;
  bool median_with_data = false;
  auto* median = app.add_subcommand("median", "Coordinatewise and spatial medians of a dataset");
  add_common(median, median_common);
  median->add_option("--data", median_data, "Dataset CSV")->required();
  median->add_option("--layout", median_layout)->check(CLI::IsMember({"rows", "cols"}));
  median->add_option("--kind", median_kind)->check(CLI::IsMember({"coordinatewise", "spatial", "both"}));
  median->add_option("--scheme", median_scheme)->check(CLI::IsMember({"trapezoid", "uniform"}));
  median->add_option("--tolerance", solver.tolerance);
  median->add_option("--max-iterations", solver.max_iterations);
  median->add_option("--epsilon", solver.data_point_epsilon, "Data-point coincidence distance");
  median->add_flag("--with-data", median_with_data, "Prepend the input curves to the output table");

  // experiment
  Common exp_common;
  std::string exp_name, exp_config;
  std::optional<int> exp_replications;
  bool exp_timing = false;
  auto* experiment = app.add_subcommand("experiment", "Run one of the Monte-Carlo experiments");
  add_common(experiment, exp_common);
  experiment->add_option("name", exp_name)
      ->required()
      ->check(CLI::IsMember({"degeneracy", "maximizer", "breakdown", "consistency"}));
  experiment->add_option("--config", exp_config, "JSON experiment configuration");
  experiment->add_option("--replications", exp_replications);
  experiment->add_flag("--timing", exp_timing, "Record wall-clock seconds in the metadata");

  // convert
  Common conv_common;
  std::string conv_in, conv_layout = "rows";
  auto* convert = app.add_subcommand("convert", "Re-emit a dataset in canonical CSV or JSON");
  add_common(convert, conv_common);
  convert->add_option("--in", conv_in, "Dataset CSV")->required();
  convert->add_option("--layout", conv_layout)->check(CLI::IsMember({"rows", "cols"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sim) {
      GPSpec spec;
      spec.kind = parse_process(sim_process);
      spec.hurst = sim_hurst;
      spec.start_value = sim_start;
      double jitter = 0.0;
      const FunctionalDataset data = simulate(spec, equispaced_grid<double>(sim_d), sim_n, sim_common.seed, &jitter);
      nlohmann::json meta{{"process", sim_process}, {"hurst", sim_hurst}, {"seed", sim_common.seed},
                          {"jitter_used", jitter}, {"version", std::string(kVersion)}};
      emit(sim_common, dataset_text(data, {}, sim_common, meta));
    } else if (*depth) {
      const LabeledDataset data = read_dataset_csv(depth_data, parse_layout(depth_layout));
      const LabeledDataset query = depth_query.empty() ? data : read_dataset_csv(depth_query, parse_layout(depth_layout));
      const MeasureWeights weights = quadrature_weights(data.data.grid(), parse_scheme(depth_scheme));
      const UnivariateDepth univariate =
          depth_univariate == "simplicial" ? UnivariateDepth::simplicial : UnivariateDepth::halfspace;
      BandDepthOptions band;
      band.seed = depth_common.seed;

      ExperimentReport report;
      report.columns = {"id", "family", "value", "standard_error"};
      for (Eigen::Index i = 0; i < query.data.size(); ++i) {
        const Curve x = query.data.curve(i);
        DepthResult r;
        if (depth_family == "bd") {
          r = band_depth(x, data.data, depth_order, band);
        } else if (depth_family == "hrd") {
          r = half_region_depth(x, data.data);
        } else if (depth_family == "mbd") {
          r = modified_band_depth(x, data.data, weights, depth_order);
        } else if (depth_family == "mhrd") {
          r = modified_half_region_depth(x, data.data, weights);
        } else if (depth_family == "idd") {
          r = integrated_data_depth(x, data.data, weights, univariate);
        } else {
          r = spatial_depth(x, data.data, weights,
                            depth_family == "sd" ? SpatialConvention::standard : SpatialConvention::vz);
        }
        report.rows.push_back({query.ids[static_cast<std::size_t>(i)], std::string(to_string(r.family)), r.value,
                               r.standard_error.value_or(0.0)});
      }
      report.metadata = {{"data", depth_data},         {"family", depth_family}, {"order", depth_order},
                         {"scheme", depth_scheme},     {"seed", depth_common.seed},
                         {"version", std::string(kVersion)}};
      emit(depth_common, format_report(report, report_format(depth_common)));
    } else if (*median) {
      const LabeledDataset data = read_dataset_csv(median_data, parse_layout(median_layout));
      const MeasureWeights weights = quadrature_weights(data.data.grid(), parse_scheme(median_scheme));
      std::vector<Vector> rows;
      std::vector<std::string> ids;
      if (median_with_data) {
        for (Eigen::Index i = 0; i < data.data.size(); ++i) rows.push_back(data.data.row(i).transpose());
        ids = data.ids;
      }
      nlohmann::json meta{{"version", std::string(kVersion)}};
      if (median_kind != "spatial") {
        rows.push_back(coordinatewise_median(data.data).values());
        ids.emplace_back("coordinatewise_median");
      }
      if (median_kind != "coordinatewise") {
        const auto [m, rep] = spatial_median(data.data, weights, solver);
        rows.push_back(m.values());
        ids.emplace_back("spatial_median");
        meta["solver"] = {{"iterations", rep.iterations},
                          {"final_objective", rep.final_objective},
                          {"gradient_norm", rep.gradient_norm},
                          {"converged", rep.converged}};
        if (rep.anchored_at_data_point) meta["solver"]["anchored_at_data_point"] = *rep.anchored_at_data_point;
        if (!rep.converged) std::cerr << "warning: spatial median did not converge\n";
      }
      Matrix out(static_cast<Eigen::Index>(rows.size()), data.data.grid_size());
      for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      emit(median_common, dataset_text(FunctionalDataset(data.data.grid(), std::move(out)), ids, median_common, meta));
    } else if (*experiment) {
      ExperimentConfig config = default_config(parse_experiment_kind(exp_name));
      if (!exp_config.empty()) {
        std::ifstream in(exp_config);
        if (!in) throw Error(ErrorCode::IoError, "cannot open " + exp_config);
        nlohmann::json j;
        try {
          in >> j;
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::ParseError, exp_config + ": " + e.what());
        }
        if (!j.contains("experiment")) j["experiment"] = exp_name;
        config = config_from_json(j);
        if (config.experiment != parse_experiment_kind(exp_name)) {
          throw Error(ErrorCode::InvalidValue, "config is for a different experiment");
        }
      }
      if (experiment->count("--seed") > 0) config.seed = exp_common.seed;
      if (exp_replications) config.replications = *exp_replications;
      const auto start = std::chrono::steady_clock::now();
      ExperimentReport report = run_experiment(config);
      if (exp_timing) {
        report.metadata["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      emit(exp_common, format_report(report, report_format(exp_common)));
    } else if (*convert) {
      const LabeledDataset data = read_dataset_csv(conv_in, parse_layout(conv_layout));
      emit(conv_common, dataset_text(data.data, data.ids, conv_common));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
