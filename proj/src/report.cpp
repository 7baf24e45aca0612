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

#include "sft/report.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "sft/error.hpp"

namespace sft {

namespace {

using ojson = nlohmann::ordered_json;

std::vector<int> ordinal_ranks(const Eigen::VectorXd& v) {
  const auto order = argsort_descending(v);
  std::vector<int> ranks(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) ranks[order[k]] = static_cast<int>(k + 1);
  return ranks;
}

// JSON has no infinities or NaN; keep them as strings so the round trip holds.
ojson number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double to_number(const ojson& j, const char* key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  throw Error(Errc::SchemaViolation, fmt::format("report field '{}' is not a number", key));
}

const ojson& field(const ojson& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(Errc::SchemaViolation, fmt::format("report is missing '{}'", key));
  }
  return *it;
}

std::size_t brand_width(const std::vector<std::string>& names, std::size_t floor) {
  std::size_t w = floor;
  for (const auto& n : names) w = std::max(w, n.size());
  return w;
}

}  // namespace

RunReport make_run_report(std::string model_id, std::string category, const GroundTruth& truth,
                          const Eigen::VectorXd& predicted, double spearman, ConfigEcho config) {
  const auto n = truth.brands.size();
  if (static_cast<std::size_t>(predicted.size()) != n) {
    throw Error(Errc::LengthMismatch,
                fmt::format("{} predictions for {} brands", predicted.size(), n));
  }
  RunReport r;
  r.model_id = std::move(model_id);
  r.category = std::move(category);
  r.config = config;
  const Eigen::VectorXd pred_pct = 100.0 * predicted;
  if (n > 0) {
    const auto pred_rank = ordinal_ranks(pred_pct);
    const auto true_rank = ordinal_ranks(truth.shares_pct);
    for (std::size_t i = 0; i < n; ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      r.rows.push_back({truth.brands[i], pred_pct(e), truth.shares_pct(e),
                        std::abs(pred_pct(e) - truth.shares_pct(e)), pred_rank[i], true_rank[i]});
    }
    std::stable_sort(r.rows.begin(), r.rows.end(), [](const ReportRow& a, const ReportRow& b) {
      return a.true_rank < b.true_rank;
    });
    r.mae_pp = mae_pp(predicted, truth.shares_pct);
  }
  r.spearman = spearman;
  if (config.gamma == 1.0) r.notes.emplace_back("uncalibrated shape");
  return r;
}

void emit_report(std::ostream& out, const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ojson j;
    j["model_id"] = report.model_id;
    j["category"] = report.category;
    ojson rows = ojson::array();
    for (const auto& row : report.rows) {
      ojson o;
      o["brand"] = row.brand;
      o["pred_pct"] = number(row.pred_pct);
      o["true_pct"] = number(row.true_pct);
      o["abs_err"] = number(row.abs_err);
      o["pred_rank"] = row.pred_rank;
      o["true_rank"] = row.true_rank;
      rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    j["spearman"] = number(report.spearman);
    j["mae_pp"] = number(report.mae_pp);
    ojson cfg;
    cfg["tau"] = report.config.tau ? number(*report.config.tau) : ojson(nullptr);
    cfg["alpha"] = number(report.config.alpha);
    cfg["gamma"] = number(report.config.gamma);
    cfg["R"] = report.config.R;
    cfg["seed"] = report.config.seed;
    j["config"] = std::move(cfg);
    j["notes"] = report.notes;
    out << j.dump(2) << '\n';
    return;
  }

  std::vector<std::string> names;
  for (const auto& row : report.rows) names.push_back(row.brand);
  const auto w = brand_width(names, 5);
  if (!report.model_id.empty() || !report.category.empty()) {
    out << fmt::format("{} ({})\n", report.model_id, report.category);
  }
  out << fmt::format("{:<{}}  {:>15}  {:>15}  {:>9}  {:>10}  {:>9}\n", "Brand", w,
                     "Pred. share (%)", "True share (%)", "Abs. err.", "Pred. rank", "True rank");
  for (const auto& row : report.rows) {
    out << fmt::format("{:<{}}  {:>15.3f}  {:>15.3f}  {:>9.3f}  {:>10}  {:>9}\n", row.brand, w,
                       row.pred_pct, row.true_pct, row.abs_err, row.pred_rank, row.true_rank);
  }
  if (!report.rows.empty()) {
    out << fmt::format("Spearman = {:.3f}, MAE = {:.3f} pp\n", report.spearman, report.mae_pp);
  }
  const auto& c = report.config;
  out << fmt::format("config: tau={} alpha={} gamma={:.6f} R={} seed={}\n",
                     c.tau ? fmt::format("{}", *c.tau) : std::string("none"), c.alpha, c.gamma,
                     c.R, c.seed);
  for (const auto& note : report.notes) out << "note: " << note << '\n';
}

RunReport parse_report_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw Error(Errc::ParseError, fmt::format("report JSON: {}", e.what()));
  }
  try {
    RunReport r;
    r.model_id = field(j, "model_id").get<std::string>();
    r.category = field(j, "category").get<std::string>();
    for (const auto& o : field(j, "rows")) {
      ReportRow row;
      row.brand = field(o, "brand").get<std::string>();
      row.pred_pct = to_number(field(o, "pred_pct"), "pred_pct");
      row.true_pct = to_number(field(o, "true_pct"), "true_pct");
      row.abs_err = to_number(field(o, "abs_err"), "abs_err");
      row.pred_rank = field(o, "pred_rank").get<int>();
      row.true_rank = field(o, "true_rank").get<int>();
      r.rows.push_back(std::move(row));
    }
    r.spearman = to_number(field(j, "spearman"), "spearman");
    r.mae_pp = to_number(field(j, "mae_pp"), "mae_pp");
    const auto& cfg = field(j, "config");
    const auto& tau = field(cfg, "tau");
    if (!tau.is_null()) r.config.tau = to_number(tau, "tau");
    r.config.alpha = to_number(field(cfg, "alpha"), "alpha");
    r.config.gamma = to_number(field(cfg, "gamma"), "gamma");
    r.config.R = field(cfg, "R").get<std::uint64_t>();
    r.config.seed = field(cfg, "seed").get<std::uint64_t>();
    r.notes = field(j, "notes").get<std::vector<std::string>>();
    return r;
  } catch (const ojson::exception& e) {
    throw Error(Errc::SchemaViolation, fmt::format("report JSON: {}", e.what()));
  }
}

void emit_lock_table(std::ostream& out, const LockReport& locks,
                     const std::vector<std::string>& brands) {
  std::vector<std::string> labels;
  for (const auto& p : locks.pairs) {
    if (p.i >= brands.size() || p.j >= brands.size()) {
      throw Error(Errc::InvalidArgument, "lock pair index outside the brand list");
    }
    labels.push_back(brands[p.i] + " vs " + brands[p.j]);
  }
  const auto w = brand_width(labels, 4);
  out << fmt::format("{:<{}}  {:>6}  {:>6}  {:>11}\n", "Pair", w, "Y_ij", "Y_ji", "sum_minus_1");
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const auto& p = locks.pairs[t];
    out << fmt::format("{:<{}}  {:>6.4f}  {:>6.4f}  {:>11.4f}\n", labels[t], w, p.y_ij, p.y_ji,
                       p.sum_minus_1);
  }
}

void emit_sweep_table(std::ostream& out, std::span<const SweepRow> rows) {
  out << fmt::format("{:>5}  {:>9}  {:>8}  {:>8}  {:>15}  {:>7}\n", "tau", "k (locks)", "Spearman",
                     "MAE (pp)", "MAE improv. (%)", "p-value");
  for (const auto& r : rows) {
    out << fmt::format("{:>5.3f}  {:>9}  {:>8.3f}  {:>8.3f}  {:>15.1f}  {:>7}\n", r.tau, r.k,
                       r.spearman, r.mae_pp, r.improvement_pct,
                       r.p_value ? fmt::format("{:.4f}", *r.p_value) : std::string("---"));
  }
}

}  // namespace sft
