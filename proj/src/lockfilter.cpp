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

#include "sft/lockfilter.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <thread>
#include <utility>

#include <fmt/format.h>

#include "sft/random.hpp"

namespace sft {

LockReport detect_locks(const PairwiseMatrices& m, double tau) {
  if (!m.Y) throw Error(Errc::MissingYMatrix, "lock detection needs the yes/no matrix Y");
  if (!(tau > 0.5 && tau <= 1.0)) {
    throw Error(Errc::TauOutOfRange, fmt::format("tau = {} must lie in (0.5, 1]", tau));
  }
  const auto& Y = *m.Y;
  LockReport report{tau, {}};
  const auto n = static_cast<std::size_t>(Y.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double yij = Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double yji = Y(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      if (std::min(yij, yji) >= tau) {
        report.pairs.push_back({i, j, yij, yji, yij + yji - 1.0});
      }
    }
  }
  std::stable_sort(report.pairs.begin(), report.pairs.end(),
                   [](const LockedPair& a, const LockedPair& b) {
                     return a.sum_minus_1 > b.sum_minus_1;
                   });
  return report;
}

PairwiseMatrices downweight(const PairwiseMatrices& m, std::span<const LockedPair> pairs,
                            double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(Errc::AlphaOutOfRange, fmt::format("alpha = {} must lie in (0, 1)", alpha));
  }
  PairwiseMatrices out = m;
  for (const auto& pr : pairs) {
    const auto i = static_cast<Eigen::Index>(pr.i);
    const auto j = static_cast<Eigen::Index>(pr.j);
    if (i == j || i >= out.C.rows() || j >= out.C.rows()) {
      throw Error(Errc::InvalidArgument, fmt::format("bad pair ({}, {})", pr.i, pr.j));
    }
    out.C(i, j) = alpha * m.C(i, j);
    out.C(j, i) = alpha * m.C(j, i);
  }
  return out;
}

FitSummary summarize_fit(const PairwiseMatrices& m, double gamma, const GroundTruth& truth,
                         BtlOptions options) {
  FitSummary s;
  s.pi = btl_fit(m, options).pi;
  s.predicted = apply_power(s.pi, gamma);
  s.mae = mae_pp(s.predicted, truth.shares_pct);
  s.spearman = spearman(s.pi, truth.shares_pct);
  return s;
}

LockFilterResult lock_filter_run(const PairwiseMatrices& m, double tau, double alpha,
                                 double gamma_frozen, const GroundTruth& truth,
                                 BtlOptions options) {
  LockFilterResult r;
  r.locks = detect_locks(m, tau);
  r.alpha = alpha;
  r.gamma = gamma_frozen;
  r.baseline = summarize_fit(m, gamma_frozen, truth, options);
  if (r.locks.pairs.empty()) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw Error(Errc::AlphaOutOfRange, fmt::format("alpha = {} must lie in (0, 1)", alpha));
    }
    r.filtered = r.baseline;
  } else {
    r.filtered = summarize_fit(downweight(m, r.locks.pairs, alpha), gamma_frozen, truth, options);
  }
  r.delta_mae = r.baseline.mae - r.filtered.mae;
  return r;
}

PermutationOutcome perm_test(const PairwiseMatrices& m, const LockReport& locks, double alpha,
                             double gamma_frozen, const GroundTruth& truth,
                             PermutationOptions options) {
  const std::size_t k = locks.k();
  if (k == 0) throw Error(Errc::NoLockedPairs, "permutation test needs at least one lock");
  if (options.replicates == 0) throw Error(Errc::InvalidArgument, "R must be positive");

  std::set<std::pair<std::size_t, std::size_t>> locked;
  for (const auto& p : locks.pairs) locked.emplace(std::min(p.i, p.j), std::max(p.i, p.j));
  std::vector<LockedPair> pool;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!locked.count({i, j})) pool.push_back({i, j, 0.0, 0.0, 0.0});
    }
  }
  if (pool.size() < k) {
    throw Error(Errc::PoolTooSmall,
                fmt::format("{} candidate pairs cannot supply {} random pairs", pool.size(), k));
  }

  const double baseline_mae = summarize_fit(m, gamma_frozen, truth, options.btl).mae;
  const double lock_mae =
      summarize_fit(downweight(m, locks.pairs, alpha), gamma_frozen, truth, options.btl).mae;

  PermutationOutcome out;
  out.delta_mae_lock = baseline_mae - lock_mae;
  out.R = options.replicates;
  out.seed = options.seed;
  out.random_deltas.assign(options.replicates, 0.0);

  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<LockedPair> chosen(k);
    for (std::size_t r = begin; r < end; ++r) {
      auto rng = Xoshiro256StarStar::for_replicate(options.seed, r);
      const auto picks = sample_without_replacement(rng, pool.size(), k);
      for (std::size_t t = 0; t < k; ++t) chosen[t] = pool[picks[t]];
      const auto fit = summarize_fit(downweight(m, chosen, alpha), gamma_frozen, truth,
                                     options.btl);
      out.random_deltas[r] = baseline_mae - fit.mae;
    }
  };

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency()
                                          : options.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(options.replicates)));
  if (threads == 1) {
    run_range(0, options.replicates);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (options.replicates + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(options.replicates, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&, t, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::size_t exceed = 0;
  for (double d : out.random_deltas) {
    if (d >= out.delta_mae_lock) ++exceed;
  }
  out.p_value = static_cast<double>(1 + exceed) / static_cast<double>(options.replicates + 1);
  return out;
}

}  // namespace sft
