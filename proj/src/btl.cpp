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

#include "sft/btl.hpp"

#include <limits>

namespace sft {

namespace {

// Number of connected components in the graph with an edge wherever C > 0.
std::size_t component_count(const Eigen::MatrixXd& C) {
  const auto n = C.rows();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int components = 0;
  std::vector<Eigen::Index> stack;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    label[static_cast<std::size_t>(s)] = components;
    stack.push_back(s);
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        if (v == u || label[static_cast<std::size_t>(v)] >= 0) continue;
        if (C(u, v) > 0.0 || C(v, u) > 0.0) {
          label[static_cast<std::size_t>(v)] = components;
          stack.push_back(v);
        }
      }
    }
    ++components;
  }
  return static_cast<std::size_t>(components);
}

}  // namespace

BtlResult btl_fit(const Eigen::MatrixXd& P, const Eigen::MatrixXd& C,
                  BtlOptions options) {
  const Eigen::Index n = P.rows();
  if (P.cols() != n || C.rows() != n || C.cols() != n) {
    throw Error(Errc::ShapeMismatch, "P and C must be square and the same size");
  }
  if (options.iterations < 0) {
    throw Error(Errc::InvalidArgument, "iterations must be >= 0");
  }
  if (n == 0) throw Error(Errc::InvalidArgument, "no items to rank");
  if (n > 1 && component_count(C) > 1) {
    throw Error(Errc::DisconnectedComparisonGraph,
                "the count matrix splits the items into disconnected groups");
  }

  BtlResult result;
  result.iterations = options.iterations;
  result.epsilon = options.epsilon;

  Eigen::VectorXd wins(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) w += C(i, j) * P(i, j);
    }
    wins(i) = w;
    if (!(w > 0.0)) {
      result.warnings.push_back(
          fmt::format("item {} has zero wins; floored at epsilon = {}", i, options.epsilon));
    }
  }

  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd next(n);
  for (int it = 0; it < options.iterations; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double denom = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) denom += C(i, j) / (pi(i) + pi(j) + options.epsilon);
      }
      next(i) = wins(i) > 0.0 ? wins(i) / denom : options.epsilon;
    }
    next /= next.sum();
    result.max_relative_change = ((next - pi).array().abs() / pi.array()).maxCoeff();
    pi.swap(next);
  }
  result.pi = pi / pi.sum();
  return result;
}

GroundTruth make_ground_truth(std::vector<std::string> brands,
                              const Eigen::VectorXd& raw_shares) {
  if (static_cast<Eigen::Index>(brands.size()) != raw_shares.size()) {
    throw Error(Errc::LengthMismatch,
                fmt::format("{} brands but {} shares", brands.size(), raw_shares.size()));
  }
  if ((raw_shares.array() < 0.0).any() || !(raw_shares.sum() > 0.0)) {
    throw Error(Errc::InvalidArgument, "shares must be non-negative with a positive sum");
  }
  return {std::move(brands), 100.0 * raw_shares / raw_shares.sum()};
}

std::vector<double> calibration_grid() {
  constexpr int kPoints = 200;
  constexpr double kLo = 0.2;
  constexpr double kHi = 5.0;
  std::vector<double> grid(kPoints);
  for (int k = 0; k < kPoints; ++k) {
    grid[static_cast<std::size_t>(k)] = kLo + (kHi - kLo) * k / (kPoints - 1);
  }
  return grid;
}

CalibrationResult power_calibrate(const Eigen::VectorXd& p, const GroundTruth& truth,
                                  const std::optional<std::vector<bool>>& calibration_mask) {
  if (p.size() != truth.shares_pct.size()) {
    throw Error(Errc::LengthMismatch,
                fmt::format("{} predictions vs {} truths", p.size(), truth.shares_pct.size()));
  }
  if (calibration_mask && calibration_mask->size() != static_cast<std::size_t>(p.size())) {
    throw Error(Errc::LengthMismatch, "calibration mask length differs from p");
  }
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!calibration_mask || (*calibration_mask)[static_cast<std::size_t>(i)]) {
      rows.push_back(i);
    }
  }
  if (rows.empty()) throw Error(Errc::InvalidArgument, "calibration split is empty");

  CalibrationResult r;
  r.grid = calibration_grid();
  r.mae.reserve(r.grid.size());
  r.mae_at_gamma = std::numeric_limits<double>::infinity();
  for (double gamma : r.grid) {
    const Eigen::VectorXd q = apply_power(p, gamma);
    double sum = 0.0;
    for (Eigen::Index i : rows) sum += std::abs(100.0 * q(i) - truth.shares_pct(i));
    const double mae = sum / static_cast<double>(rows.size());
    r.mae.push_back(mae);
    if (mae < r.mae_at_gamma) {
      r.mae_at_gamma = mae;
      r.gamma = gamma;
    }
  }
  return r;
}

}  // namespace sft
