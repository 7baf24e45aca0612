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

// Labeled square matrices as comma-separated text:
//
//   ,A,B
//   A,1,0.9
//   B,0.2,1
//
// The header row lists labels; the first column repeats them in the same
// order. Labels containing commas or quotes are double-quoted.

#ifndef SFT_MATRIX_IO_HPP_
#define SFT_MATRIX_IO_HPP_

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sft/field.hpp"

namespace sft {

using CsvRow = std::vector<std::string>;

// Splits lines on commas (honoring double quotes), trims unquoted cells and
// skips blank lines.
std::vector<CsvRow> read_csv_rows(std::istream& in);
std::string csv_escape(std::string_view cell);

// Accepts decimal and exponent notation plus "inf"/"-inf"/"nan".
std::optional<double> parse_double(std::string_view text);

struct LabeledMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
};

LabeledMatrix read_labeled_matrix(std::istream& in);

// With `fixed_decimals` the values print as %.Nf, otherwise as the shortest
// decimal that round-trips.
void write_labeled_matrix(std::ostream& out, const std::vector<std::string>& labels,
                          const Eigen::MatrixXd& values,
                          std::optional<int> fixed_decimals = std::nullopt);

SimilarityField read_field_csv(std::istream& in);
void write_field_csv(std::ostream& out, const SimilarityField& field);

LabeledMatrix read_labeled_matrix_file(const std::filesystem::path& path);

}  // namespace sft

#endif  // SFT_MATRIX_IO_HPP_
