#pragma once

#include "mpdo/channels.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mpdo {

using json = nlohmann::json;

/// [[ [re, im], ... ], ...] row by row.
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

/// {"d_in", "d_out", "y_split": [d_B, d_C] | null, "kraus": [matrix, ...]}
json channel_to_json(const KrausChannel& n);
KrausChannel channel_from_json(const json& j);
KrausChannel load_channel(const std::string& path);

/// Finite doubles as numbers; ±inf as the strings "inf" / "-inf"; NaN as null.
json number_to_json(double x);

/// Shortest-safe rendering with 17 significant digits.
std::string format_double(double x);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Comma-separated table with a leading "# key: value" comment block, LF endings.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_comment(const std::string& key, const std::string& value) { comments_.emplace_back(key, value); }
  /// Cells are pre-formatted; the row width must match the header.
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> comments_;
  std::vector<std::vector<std::string>> rows_;
};

} // namespace mpdo
