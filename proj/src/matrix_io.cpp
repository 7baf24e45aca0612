// Copyright 2026 The SFT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sft/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "sft/error.hpp"

namespace sft {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

CsvRow split_line(const std::string& line, std::size_t line_no) {
  CsvRow cells;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
      was_quoted = true;
      cur = trim(cur);
    } else if (ch == ',') {
      cells.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) {
    throw Error(Errc::ParseError, fmt::format("line {}: unterminated quote", line_no));
  }
  cells.push_back(was_quoted ? cur : trim(cur));
  return cells;
}

}  // namespace

std::vector<CsvRow> read_csv_rows(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line, line_no));
  }
  return rows;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"") == std::string_view::npos &&
      trim(cell) == cell) {
    return std::string(cell);
  }
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  if (t == "inf" || t == "+inf" || t == "Infinity") {
    return std::numeric_limits<double>::infinity();
  }
  if (t == "-inf" || t == "-Infinity") return -std::numeric_limits<double>::infinity();
  if (t == "nan" || t == "NaN") return std::numeric_limits<double>::quiet_NaN();
  const char* first = t.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

LabeledMatrix read_labeled_matrix(std::istream& in) {
  const auto rows = read_csv_rows(in);
  if (rows.empty()) return {};
  const CsvRow& header = rows.front();
  LabeledMatrix m;
  m.labels.assign(header.begin() + 1, header.end());
  const std::size_t n = m.labels.size();
  if (rows.size() != n + 1) {
    throw Error(Errc::ShapeMismatch,
                fmt::format("{} labels but {} data rows", n, rows.size() - 1));
  }
  m.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const CsvRow& row = rows[i + 1];
    if (row.size() != n + 1) {
      throw Error(Errc::ShapeMismatch,
                  fmt::format("row {} has {} cells, expected {}", i + 2, row.size(),
                              n + 1));
    }
    if (row.front() != m.labels[i]) {
      throw Error(Errc::ParseError,
                  fmt::format("row {} label '{}' does not match header '{}'", i + 2,
                              row.front(), m.labels[i]));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = parse_double(row[j + 1]);
      if (!v) {
        throw Error(Errc::ParseError,
                    fmt::format("row {} column {}: '{}' is not a number", i + 2, j + 2,
                                row[j + 1]));
      }
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
    }
  }
  return m;
}

void write_labeled_matrix(std::ostream& out, const std::vector<std::string>& labels,
                          const Eigen::MatrixXd& values,
                          std::optional<int> fixed_decimals) {
  for (const auto& l : labels) out << ',' << csv_escape(l);
  out << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << csv_escape(labels[i]);
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const double v = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out << ',';
      if (fixed_decimals) {
        out << fmt::format("{:.{}f}", v, *fixed_decimals);
      } else {
        out << fmt::format("{}", v);
      }
    }
    out << '\n';
  }
}

SimilarityField read_field_csv(std::istream& in) {
  auto m = read_labeled_matrix(in);
  return make_field(std::move(m.labels), std::move(m.values));
}

void write_field_csv(std::ostream& out, const SimilarityField& field) {
  write_labeled_matrix(out, field.entities().labels(), field.values());
}

LabeledMatrix read_labeled_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, fmt::format("cannot open '{}'", path.string()));
  return read_labeled_matrix(in);
}

}  // namespace sft
