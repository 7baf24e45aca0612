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

// Bradley-Terry-Luce aggregation of soft pairwise counts, power calibration
// of the resulting simplex vector, and the evaluation metrics used against
// ground-truth shares.

#ifndef SFT_BTL_HPP_
#define SFT_BTL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "sft/error.hpp"
#include "sft/probes.hpp"

namespace sft {

struct BtlOptions {
  int iterations = 300;
  double epsilon = 1e-9;
};

struct BtlResult {
  Eigen::VectorXd pi;  // positive, sums to 1
  int iterations = 0;
  double epsilon = 0.0;
  // max_i |pi_new - pi_old| / pi_old over the final iteration; diagnostic only
  double max_relative_change = 0.0;
  std::vector<std::string> warnings;
};

// Minorize-maximize fit of Pr(i > j) = pi_i / (pi_i + pi_j) on soft counts
// wins_i = sum_j C_ij P_ij. Starts uniform, renormalizes after every update
// and runs exactly `iterations` sweeps. Rows with zero wins are floored at
// epsilon and reported in `warnings`.
BtlResult btl_fit(const Eigen::MatrixXd& P, const Eigen::MatrixXd& C,
                  BtlOptions options = {});

inline BtlResult btl_fit(const PairwiseMatrices& m, BtlOptions options = {}) {
  return btl_fit(m.P, m.C, options);
}

struct GroundTruth {
  std::vector<std::string> brands;
  Eigen::VectorXd shares_pct;  // normalized, sums to 100
};

// Rescales raw shares to sum to 100.
GroundTruth make_ground_truth(std::vector<std::string> brands,
                              const Eigen::VectorXd& raw_shares);

// p_i^gamma / sum_k p_k^gamma, evaluated in the log domain.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_power(
    const Eigen::MatrixBase<Derived>& p, typename Derived::Scalar gamma) {
  using Scalar = typename Derived::Scalar;
  if (!(gamma > Scalar(0))) {
    throw Error(Errc::GammaNonPositive, fmt::format("gamma = {} must be > 0", gamma));
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> logs = gamma * p.array().log().matrix();
  const Scalar top = logs.maxCoeff();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> q = (logs.array() - top).exp().matrix();
  return q / q.sum();
}

// Indices that sort `v` descending; ties keep index order.
template <typename Derived>
std::vector<std::size_t> argsort_descending(const Eigen::MatrixBase<Derived>& v) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return v(static_cast<Eigen::Index>(a)) > v(static_cast<Eigen::Index>(b));
  });
  return idx;
}

// 1-based ranks with ties sharing their average rank; larger values rank
// first.
template <typename Derived>
Eigen::VectorXd average_ranks(const Eigen::MatrixBase<Derived>& v) {
  const auto order = argsort_descending(v);
  Eigen::VectorXd ranks(v.size());
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k + 1;
    while (end < order.size() && v(static_cast<Eigen::Index>(order[end])) ==
                                     v(static_cast<Eigen::Index>(order[k]))) {
      ++end;
    }
    const double r = 0.5 * static_cast<double>(k + 1 + end);
    for (std::size_t t = k; t < end; ++t) ranks(static_cast<Eigen::Index>(order[t])) = r;
    k = end;
  }
  return ranks;
}

template <typename Derived>
bool has_duplicates(const Eigen::MatrixBase<Derived>& v) {
  std::vector<typename Derived::Scalar> s;
  s.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) s.push_back(v(i));
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) != s.end();
}

// Spearman rank correlation. Uses 1 - 6 sum d^2 / (n (n^2 - 1)) without ties
// and Pearson correlation of average ranks otherwise; NaN if either side is
// constant.
template <typename D1, typename D2>
double spearman(const Eigen::MatrixBase<D1>& pred, const Eigen::MatrixBase<D2>& truth) {
  if (pred.size() != truth.size()) {
    throw Error(Errc::LengthMismatch,
                fmt::format("{} predictions vs {} truths", pred.size(), truth.size()));
  }
  if (pred.size() < 2) throw Error(Errc::InvalidArgument, "spearman needs n >= 2");
  const Eigen::VectorXd rp = average_ranks(pred);
  const Eigen::VectorXd rt = average_ranks(truth);
  const auto n = static_cast<double>(pred.size());
  const bool ties = has_duplicates(pred) || has_duplicates(truth);
  if (!ties) {
    const double d2 = (rp - rt).squaredNorm();
    return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
  }
  const Eigen::VectorXd a = rp.array() - rp.mean();
  const Eigen::VectorXd b = rt.array() - rt.mean();
  const double den = std::sqrt(a.squaredNorm() * b.squaredNorm());
  if (den == 0.0) return std::nan("");
  return a.dot(b) / den;
}

// Mean over brands of |100 pred_i - truth_pct_i|, in percentage points.
template <typename D1, typename D2>
double mae_pp(const Eigen::MatrixBase<D1>& pred, const Eigen::MatrixBase<D2>& truth_pct) {
  if (pred.size() != truth_pct.size()) {
    throw Error(Errc::LengthMismatch,
                fmt::format("{} predictions vs {} truths", pred.size(), truth_pct.size()));
  }
  if (pred.size() == 0) return 0.0;
  return (100.0 * pred.array() - truth_pct.array()).abs().mean();
}

inline double mae_pp(const Eigen::VectorXd& pred, const GroundTruth& truth) {
  return mae_pp(pred, truth.shares_pct);
}

// 200 evenly spaced gammas on [0.2, 5.0], both ends included.
std::vector<double> calibration_grid();

struct CalibrationResult {
  double gamma = 1.0;
  double mae_at_gamma = 0.0;
  std::vector<double> grid;
  std::vector<double> mae;  // per grid point
};

// Picks the grid gamma minimizing MAE(apply_power(p, gamma), truth); ties go
// to the smaller gamma. `calibration_mask`, when given, restricts the MAE to
// the flagged brands (a holdout split).
CalibrationResult power_calibrate(const Eigen::VectorXd& p, const GroundTruth& truth,
                                  const std::optional<std::vector<bool>>&
                                      calibration_mask = std::nullopt);

}  // namespace sft

#endif  // SFT_BTL_HPP_
