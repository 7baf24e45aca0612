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

// Lock filter: an unordered pair {i, j} is locked when both directed
// yes-probabilities reach tau, i.e. each brand is judged more typical than
// the other. Under an asymmetric similarity field that mutual inclusion is
// impossible, so locked pairs are treated as measurement noise: their counts
// are down-weighted and BTL is refit with the calibration gamma held fixed.
// A permutation control down-weights random non-locked pairs of the same
// size to judge whether the improvement is specific to the locks.

#ifndef SFT_LOCKFILTER_HPP_
#define SFT_LOCKFILTER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sft/btl.hpp"
#include "sft/probes.hpp"

namespace sft {

struct LockedPair {
  std::size_t i;  // i < j
  std::size_t j;
  double y_ij;
  double y_ji;
  double sum_minus_1;  // y_ij + y_ji - 1
};

struct LockReport {
  double tau = 0.0;
  std::vector<LockedPair> pairs;  // sum_minus_1 descending, then (i, j)

  [[nodiscard]] std::size_t k() const noexcept { return pairs.size(); }
};

// All unordered pairs with min(Y_ij, Y_ji) >= tau, tau in (0.5, 1].
LockReport detect_locks(const PairwiseMatrices& m, double tau);

// C'_ij = C'_ji = alpha * C_ij for each listed pair; P untouched.
PairwiseMatrices downweight(const PairwiseMatrices& m, std::span<const LockedPair> pairs,
                            double alpha = 0.01);

struct FitSummary {
  Eigen::VectorXd pi;         // raw BTL strengths
  Eigen::VectorXd predicted;  // apply_power(pi, gamma)
  double mae = 0.0;           // pp
  double spearman = 0.0;
};

FitSummary summarize_fit(const PairwiseMatrices& m, double gamma, const GroundTruth& truth,
                         BtlOptions options = {});

struct LockFilterResult {
  LockReport locks;
  double alpha = 0.0;
  double gamma = 0.0;
  FitSummary baseline;
  FitSummary filtered;
  double delta_mae = 0.0;  // baseline.mae - filtered.mae

  [[nodiscard]] double improvement_pct() const noexcept {
    return baseline.mae > 0.0 ? 100.0 * delta_mae / baseline.mae : 0.0;
  }
};

// Detects locks at tau, down-weights them, refits and evaluates under the
// frozen gamma. With no locks the filtered fit equals the baseline.
LockFilterResult lock_filter_run(const PairwiseMatrices& m, double tau, double alpha,
                                 double gamma_frozen, const GroundTruth& truth,
                                 BtlOptions options = {});

struct PermutationOutcome {
  double delta_mae_lock = 0.0;
  std::vector<double> random_deltas;  // indexed by replicate
  double p_value = 1.0;
  std::size_t R = 0;
  std::uint64_t seed = 0;
};

struct PermutationOptions {
  std::size_t replicates = 10000;
  std::uint64_t seed = 123;
  unsigned threads = 1;  // 0 = hardware concurrency
  BtlOptions btl;
};

// Upper-tail permutation test with add-one smoothing:
//   p = (1 + #{r : delta_r >= delta_lock}) / (R + 1).
// Replicate r samples k pairs without replacement from the non-locked pairs
// (enumerated lexicographically by (i, j)) using
// Xoshiro256StarStar::for_replicate(seed, r); results do not depend on the
// thread count.
PermutationOutcome perm_test(const PairwiseMatrices& m, const LockReport& locks, double alpha,
                             double gamma_frozen, const GroundTruth& truth,
                             PermutationOptions options = {});

}  // namespace sft

#endif  // SFT_LOCKFILTER_HPP_
