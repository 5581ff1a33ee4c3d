#ifndef FNDEPTH_IO_HPP
#define FNDEPTH_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fndepth/core.hpp"

namespace fndepth {

// Dataset CSV: a header row "t,<t_1>,...,<t_d>" followed by one
// "<curve_id>,<v_1>,...,<v_d>" row per curve. cols_are_curves is the
// transpose: the first column holds the grid, the header row holds curve ids.
enum class CsvLayout { rows_are_curves, cols_are_curves };

struct LabeledDataset {
  FunctionalDataset data;
  std::vector<std::string> ids;
};

LabeledDataset parse_dataset_csv(std::string_view text, CsvLayout layout = CsvLayout::rows_are_curves);
LabeledDataset read_dataset_csv(const std::filesystem::path& path, CsvLayout layout = CsvLayout::rows_are_curves);
FunctionalDataset load_dataset_csv(const std::filesystem::path& path,
                                   CsvLayout layout = CsvLayout::rows_are_curves);

/// Writes in rows_are_curves layout. Missing ids default to 0..n-1.
std::string format_dataset_csv(const FunctionalDataset& data, const std::vector<std::string>& ids = {});
void write_dataset_csv(const std::filesystem::path& path, const FunctionalDataset& data,
                       const std::vector<std::string>& ids = {});

nlohmann::json dataset_to_json(const FunctionalDataset& data, const std::vector<std::string>& ids = {});

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

using Cell = std::variant<std::int64_t, double, std::string>;

struct ExperimentReport {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

enum class ReportFormat { csv, json };

/// CSV: header then one line per row, RFC 4180 quoting. JSON: {"metadata", "rows"}
/// with each row an object keyed by column name.
std::string format_report(const ExperimentReport& report, ReportFormat format);
void write_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace fndepth

#endif  // FNDEPTH_IO_HPP
