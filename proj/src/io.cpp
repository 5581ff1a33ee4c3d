#include "fndepth/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace fndepth {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_double(std::string_view cell, std::size_t line, std::size_t column) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || end != cell.data() + cell.size() || cell.empty() || !std::isfinite(value)) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                           ": '" + std::string(cell) + "' is not a finite number");
  }
  return value;
}

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_text(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  return std::get<std::string>(cell);
}

nlohmann::json cell_json(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  return std::get<std::string>(cell);
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

LabeledDataset parse_dataset_csv(std::string_view text, CsvLayout layout) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty dataset file");

  // Cells as a rectangular table, line numbers 1-based.
  std::vector<std::vector<std::string_view>> table;
  table.reserve(lines.size());
  for (std::size_t r = 0; r < lines.size(); ++r) {
    table.push_back(split_fields(lines[r]));
    if (table.back().size() != table.front().size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(r + 1) + " has " +
                                             std::to_string(table.back().size()) + " fields, expected " +
                                             std::to_string(table.front().size()));
    }
  }
  const std::size_t rows = table.size();
  const std::size_t cols = table.front().size();
  if (rows < 2 || cols < 2) throw Error(ErrorCode::ParseError, "need a grid header and at least one curve");

  const bool by_row = layout == CsvLayout::rows_are_curves;
  const std::size_t d = by_row ? cols - 1 : rows - 1;
  const std::size_t n = by_row ? rows - 1 : cols - 1;
  // cell(i, k): curve i, grid point k, with 1-based line/column for errors.
  auto at = [&](std::size_t curve, std::size_t point) -> std::pair<std::string_view, std::pair<std::size_t, std::size_t>> {
    const std::size_t r = by_row ? curve : point;
    const std::size_t c = by_row ? point : curve;
    return {table[r][c], {r + 1, c + 1}};
  };

  std::vector<double> grid(d);
  for (std::size_t k = 0; k < d; ++k) {
    const auto [cell, pos] = at(0, k + 1);
    grid[k] = parse_double(cell, pos.first, pos.second);
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
  for (std::size_t k = 1; k < d; ++k) {
    if (grid[order[k]] == grid[order[k - 1]]) {
      throw Error(ErrorCode::DuplicateGridPoint, "grid point " + format_number(grid[order[k]]) + " repeated");
    }
  }

  Vector points(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) points[static_cast<Eigen::Index>(k)] = grid[order[k]];
  Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = std::string(at(i + 1, 0).first);
    for (std::size_t k = 0; k < d; ++k) {
      const auto [cell, pos] = at(i + 1, order[k] + 1);
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = parse_double(cell, pos.first, pos.second);
    }
  }
  return {FunctionalDataset(Grid(std::move(points)), std::move(values)), std::move(ids)};
}

LabeledDataset read_dataset_csv(const std::filesystem::path& path, CsvLayout layout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "failed reading " + path.string());
  return parse_dataset_csv(buffer.str(), layout);
}

FunctionalDataset load_dataset_csv(const std::filesystem::path& path, CsvLayout layout) {
  return read_dataset_csv(path, layout).data;
}

std::string format_dataset_csv(const FunctionalDataset& data, const std::vector<std::string>& ids) {
  std::string out = "t";
  for (Eigen::Index k = 0; k < data.grid_size(); ++k) out += "," + format_number(data.grid()[k]);
  out += '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out += idx < ids.size() ? csv_quote(ids[idx]) : std::to_string(i);
    for (Eigen::Index k = 0; k < data.grid_size(); ++k) out += "," + format_number(data.values()(i, k));
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

void write_dataset_csv(const std::filesystem::path& path, const FunctionalDataset& data,
                       const std::vector<std::string>& ids) {
  write_text(path, format_dataset_csv(data, ids));
}

nlohmann::json dataset_to_json(const FunctionalDataset& data, const std::vector<std::string>& ids) {
  nlohmann::json out;
  out["grid"] = std::vector<double>(data.grid().points().begin(), data.grid().points().end());
  nlohmann::json curves = nlohmann::json::array();
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    nlohmann::json c;
    c["id"] = idx < ids.size() ? ids[idx] : std::to_string(i);
    std::vector<double> v(static_cast<std::size_t>(data.grid_size()));
    for (Eigen::Index k = 0; k < data.grid_size(); ++k) v[static_cast<std::size_t>(k)] = data.values()(i, k);
    c["values"] = std::move(v);
    curves.push_back(std::move(c));
  }
  out["curves"] = std::move(curves);
  return out;
}

std::size_t ExperimentReport::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorCode::InvalidValue, "no column named " + std::string(name));
  return static_cast<std::size_t>(it - columns.begin());
}

double ExperimentReport::number(std::size_t row, std::string_view name) const {
  const Cell& cell = rows.at(row).at(column(name));
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  throw Error(ErrorCode::InvalidValue, "column " + std::string(name) + " is not numeric");
}

std::string format_report(const ExperimentReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t c = 0; c < report.columns.size() && c < row.size(); ++c) {
        obj[report.columns[c]] = cell_json(row[c]);
      }
      rows.push_back(std::move(obj));
    }
    nlohmann::json doc;
    doc["metadata"] = report.metadata;
    doc["columns"] = report.columns;
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    if (c > 0) out += ',';
    out += csv_quote(report.columns[c]);
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += csv_quote(cell_text(row[c]));
    }
    out += '\n';
  }
  return out;
}

void write_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& path) {
  write_text(path, format_report(report, format));
}

}  // namespace fndepth
