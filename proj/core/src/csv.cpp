#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "shum/data_model.hpp"

namespace shum {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

// Minimal RFC-4180 split: commas inside double quotes do not separate fields.
std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      current.push_back(ch);
    } else if (ch == ',' && !quoted) {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

bool is_missing(std::string_view cell) { return cell.empty() || cell == "NA"; }

std::optional<double> parse_double(std::string_view cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long long> parse_outcome(std::string_view cell) {
  long long code = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), code);
  if (ec == std::errc() && ptr == cell.data() + cell.size()) return code;
  // Accept integral values written as reals, e.g. "2.0".
  if (auto v = parse_double(cell); v && std::floor(*v) == *v && std::abs(*v) < 9e15) {
    return static_cast<long long>(*v);
  }
  return std::nullopt;
}

}  // namespace

CsvLoadResult load_csv(const std::filesystem::path& path, std::string_view outcome_column,
                       const std::vector<std::string>& marker_columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  if (marker_columns.empty()) throw Error(ErrorCode::InvalidArgument, "no marker columns given");

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, path.string() + " has no header row");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM

  std::vector<std::string> header;
  for (auto& f : split_row(line)) header.emplace_back(trim(f));
  auto column_of = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::MissingColumn, "column '" + std::string(name) + "' not found in " +
                                                path.string());
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t outcome_idx = column_of(outcome_column);
  std::vector<std::size_t> marker_idx;
  for (const auto& m : marker_columns) marker_idx.push_back(column_of(m));

  std::map<long long, std::vector<std::vector<double>>> groups;
  std::size_t rows_read = 0;
  std::size_t dropped = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++rows_read;
    const auto fields = split_row(line);
    auto cell = [&](std::size_t idx) -> std::string_view {
      return idx < fields.size() ? trim(fields[idx]) : std::string_view{};
    };
    const auto outcome_cell = cell(outcome_idx);
    if (is_missing(outcome_cell)) {
      ++dropped;
      continue;
    }
    const auto code = parse_outcome(outcome_cell);
    if (!code) {
      throw Error(ErrorCode::UnparseableNumeric,
                  "row " + std::to_string(line_no) + ": outcome '" + std::string(outcome_cell) +
                      "' is not an integer code");
    }
    std::vector<double> row;
    row.reserve(marker_idx.size());
    bool incomplete = false;
    for (std::size_t k = 0; k < marker_idx.size(); ++k) {
      const auto c = cell(marker_idx[k]);
      if (is_missing(c)) {
        incomplete = true;
        continue;
      }
      const auto v = parse_double(c);
      if (!v) {
        throw Error(ErrorCode::UnparseableNumeric,
                    "row " + std::to_string(line_no) + ", column '" + marker_columns[k] +
                        "': cannot parse '" + std::string(c) + "'");
      }
      row.push_back(*v);
    }
    if (incomplete) {
      ++dropped;
      continue;
    }
    groups[*code].push_back(std::move(row));
  }

  if (groups.size() < 2) {
    throw Error(ErrorCode::FewerThanTwoCategories,
                "outcome column '" + std::string(outcome_column) + "' has " +
                    std::to_string(groups.size()) + " level(s) after dropping incomplete rows");
  }

  std::vector<Eigen::MatrixXd> categories;
  std::vector<std::string> labels;
  const auto d = static_cast<Eigen::Index>(marker_columns.size());
  for (const auto& [code, rows] : groups) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (Eigen::Index k = 0; k < d; ++k) m(static_cast<Eigen::Index>(i), k) = rows[i][k];
    }
    categories.push_back(std::move(m));
    labels.push_back(std::to_string(code));
  }
  return CsvLoadResult{MarkerDataset::create(std::move(categories), marker_columns, labels),
                       rows_read, dropped};
}

void write_csv(const MarkerDataset& data, const std::filesystem::path& path,
               std::string_view outcome_column) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << outcome_column;
  for (const auto& name : data.marker_names()) out << ',' << name;
  out << '\n';
  char buf[32];
  for (std::size_t j = 0; j < data.num_categories(); ++j) {
    std::string label = data.category_labels()[j];
    if (!parse_outcome(label)) label = std::to_string(j);
    const auto& c = data.category(j);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      out << label;
      for (Eigen::Index k = 0; k < c.cols(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", c(i, k));
        out << ',' << buf;
      }
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace shum
