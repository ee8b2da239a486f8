#include "mpdo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mpdo {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix: expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw std::invalid_argument("matrix: rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix: ragged row " + std::to_string(r));
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw std::invalid_argument("matrix: entry (" + std::to_string(r) + "," + std::to_string(c) +
                                    ") must be [re, im]");
      }
    }
  }
  return m;
}

json channel_to_json(const KrausChannel& n) {
  json j;
  j["d_in"] = n.d_in();
  j["d_out"] = n.d_out();
  j["y_split"] = n.y_split() ? json::array({n.y_split()->d_b, n.y_split()->d_c}) : json(nullptr);
  json kraus = json::array();
  for (const auto& k : n.kraus()) kraus.push_back(matrix_to_json(k));
  j["kraus"] = std::move(kraus);
  return j;
}

KrausChannel channel_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("channel: expected a JSON object");
  for (const char* key : {"d_in", "d_out", "kraus"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("channel: missing field '") + key + "'");
  const int d_in = j.at("d_in").get<int>();
  const int d_out = j.at("d_out").get<int>();
  std::optional<YSplit> split;
  if (j.contains("y_split") && !j.at("y_split").is_null()) {
    const json& y = j.at("y_split");
    if (!y.is_array() || y.size() != 2) throw std::invalid_argument("channel: y_split must be [d_B, d_C] or null");
    split = YSplit{y[0].get<int>(), y[1].get<int>()};
  }
  if (!j.at("kraus").is_array() || j.at("kraus").empty())
    throw std::invalid_argument("channel: kraus must be a non-empty array");
  std::vector<Matrix> kraus;
  for (const auto& k : j.at("kraus")) kraus.push_back(matrix_from_json(k));
  return {std::move(kraus), d_in, d_out, split};
}

KrausChannel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open channel file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("channel file '" + path + "' is not valid JSON: " + e.what());
  }
  return channel_from_json(j);
}

json number_to_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw std::invalid_argument("CsvTable: row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (const auto& [k, v] : comments_) out << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
  return out.str();
}

} // namespace mpdo
