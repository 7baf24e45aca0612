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

// Run reports: per-brand table with rank columns and a metric footer, plus
// lock and sweep tables. Text output prints 3 decimals; JSON keeps full
// precision and parses back to an identical report.

#ifndef SFT_REPORT_HPP_
#define SFT_REPORT_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sft/btl.hpp"
#include "sft/lockfilter.hpp"

namespace sft {

struct ReportRow {
  std::string brand;
  double pred_pct = 0.0;
  double true_pct = 0.0;
  double abs_err = 0.0;
  int pred_rank = 0;  // 1 = largest
  int true_rank = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ConfigEcho {
  std::optional<double> tau;
  double alpha = 0.01;
  double gamma = 1.0;
  std::uint64_t R = 10000;
  std::uint64_t seed = 123;

  friend bool operator==(const ConfigEcho&, const ConfigEcho&) = default;
};

struct RunReport {
  std::string model_id;
  std::string category;
  std::vector<ReportRow> rows;  // sorted by true rank
  double spearman = 0.0;
  double mae_pp = 0.0;
  ConfigEcho config;
  std::vector<std::string> notes;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// `predicted` is a simplex vector aligned with truth.brands. `spearman` is
// passed in because the rank metric is computed from raw BTL strengths.
// A gamma of exactly 1 adds an "uncalibrated shape" note.
RunReport make_run_report(std::string model_id, std::string category, const GroundTruth& truth,
                          const Eigen::VectorXd& predicted, double spearman, ConfigEcho config);

enum class ReportFormat { kTable, kJson };

// Table: header, one row per brand, "Spearman = X, MAE = Y pp" footer. An
// empty report prints the header only.
void emit_report(std::ostream& out, const RunReport& report, ReportFormat format);

// Inverse of the JSON format; throws ParseError or SchemaViolation.
RunReport parse_report_json(std::string_view text);

// "Pair  Y_ij  Y_ji  sum_minus_1" with 4 decimals.
void emit_lock_table(std::ostream& out, const LockReport& locks,
                     const std::vector<std::string>& brands);

struct SweepRow {
  double tau = 0.0;
  std::size_t k = 0;
  double spearman = 0.0;
  double mae_pp = 0.0;
  double improvement_pct = 0.0;
  std::optional<double> p_value;  // empty when k = 0
};

// Columns: tau, k (locks), Spearman, MAE (pp), MAE improv. (%), p-value.
void emit_sweep_table(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace sft

#endif  // SFT_REPORT_HPP_
