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
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "planted.hpp"
#include "sft/error.hpp"
#include "sft/field.hpp"
#include "sft/fixtures.hpp"
#include "sft/random.hpp"

namespace sft {
namespace {

using testing::planted_fixture;
using testing::planted_truth;

template <typename Fn>
Errc code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::InvalidArgument;
}

TEST(DetectLocks, AllHalfHasNone) {
  auto m = pythia_csd_matrices();
  m.Y = Eigen::MatrixXd::Constant(10, 10, 0.5);
  EXPECT_EQ(detect_locks(m, 0.67).k(), 0u);
}

TEST(DetectLocks, PublishedPairsAndSweepEnd) {
  const auto m = gemma_lock_fixture();
  const auto r = detect_locks(m, 0.67);
  ASSERT_EQ(r.k(), 4u);
  const auto published = gemma_csd_locks();
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(m.brands[r.pairs[t].i], published[t].brand_i);
    EXPECT_EQ(m.brands[r.pairs[t].j], published[t].brand_j);
    EXPECT_NEAR(r.pairs[t].sum_minus_1, published[t].sum_minus_1, 5e-5);
  }
  EXPECT_EQ(detect_locks(m, 0.69).k(), 0u);
}

TEST(DetectLocks, Errors) {
  const auto m = pythia_csd_matrices();
  EXPECT_EQ(code_of([&] { detect_locks(m, 0.7); }), Errc::MissingYMatrix);
  const auto g = gemma_lock_fixture();
  EXPECT_EQ(code_of([&] { detect_locks(g, 0.5); }), Errc::TauOutOfRange);
  EXPECT_EQ(code_of([&] { detect_locks(g, 1.01); }), Errc::TauOutOfRange);
  EXPECT_NO_THROW(detect_locks(g, 1.0));
}

TEST(DetectLocks, CountIsMonotoneInTauAndLocksAreIncompatible) {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(0.3, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = planted_fixture();
    for (Eigen::Index i = 0; i < 6; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) (*m.Y)(i, j) = i == j ? 0.0 : u(rng);
    }
    std::size_t prev = detect_locks(m, 0.51).k();
    for (double tau = 0.52; tau <= 1.0; tau += 0.01) {
      const auto r = detect_locks(m, tau);
      ASSERT_LE(r.k(), prev);
      prev = r.k();
      for (const auto& p : r.pairs) {
        ASSERT_GE(std::min(p.y_ij, p.y_ji), tau);
        ASSERT_EQ(p.sum_minus_1, p.y_ij + p.y_ji - 1.0);
        if (p.y_ij != p.y_ji) {
          ASSERT_FALSE(incompatibility(p.y_ij, p.y_ji).mutual());
        }
      }
      for (std::size_t t = 1; t < r.pairs.size(); ++t) {
        ASSERT_GE(r.pairs[t - 1].sum_minus_1, r.pairs[t].sum_minus_1);
      }
    }
  }
}

TEST(Downweight, Examples) {
  const auto m = planted_fixture();
  const auto same = downweight(m, {});
  EXPECT_EQ(same.C, m.C);
  const std::vector<LockedPair> one{{0, 1, 0.8, 0.8, 0.6}};
  const auto d = downweight(m, one, 0.01);
  EXPECT_DOUBLE_EQ(d.C(0, 1), 0.11);
  EXPECT_DOUBLE_EQ(d.C(1, 0), 0.11);
  EXPECT_EQ(d.P, m.P);
  EXPECT_EQ(code_of([&] { downweight(m, one, 0.0); }), Errc::AlphaOutOfRange);
  EXPECT_EQ(code_of([&] { downweight(m, one, 1.0); }), Errc::AlphaOutOfRange);
}

TEST(Downweight, KeepsCountsSymmetric) {
  std::mt19937_64 rng(71);
  const auto m = planted_fixture();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LockedPair> ps;
    for (int k = 0; k < 4; ++k) {
      const std::size_t i = rng() % 6;
      const std::size_t j = rng() % 6;
      if (i != j) ps.push_back({std::min(i, j), std::max(i, j), 0, 0, 0});
    }
    const auto d = downweight(m, ps, 0.05);
    ASSERT_EQ(d.C, d.C.transpose());
  }
}

TEST(LockFilterRun, NoLocksEqualsBaseline) {
  const auto m = gemma_lock_fixture();
  const auto truth = load_truth("csd");
  const auto r = lock_filter_run(m, 0.69, 0.01, 1.1, truth);
  EXPECT_EQ(r.locks.k(), 0u);
  EXPECT_EQ(r.delta_mae, 0.0);
  EXPECT_EQ(r.filtered.pi, r.baseline.pi);
  EXPECT_EQ(r.improvement_pct(), 0.0);
}

TEST(LockFilterRun, PlantedLocksImproveMae) {
  const auto m = planted_fixture();
  const auto truth = planted_truth();
  const auto r = lock_filter_run(m, 0.7, 0.01, 1.0, truth);
  EXPECT_EQ(r.locks.k(), 2u);
  EXPECT_GT(r.delta_mae, 0.0);
  EXPECT_NEAR(r.baseline.mae - r.filtered.mae, r.delta_mae, 1e-15);
}

TEST(PermTest, PValueMatchesDefinitionAndBounds) {
  const auto m = planted_fixture();
  const auto truth = planted_truth();
  const auto locks = detect_locks(m, 0.7);
  PermutationOptions o;
  o.replicates = 500;
  const auto out = perm_test(m, locks, 0.01, 1.0, truth, o);
  ASSERT_EQ(out.random_deltas.size(), 500u);
  std::size_t exceed = 0;
  for (double d : out.random_deltas) exceed += d >= out.delta_mae_lock;
  EXPECT_EQ(out.p_value, (1.0 + static_cast<double>(exceed)) / 501.0);
  EXPECT_GE(out.p_value, 1.0 / 501.0);
  EXPECT_LE(out.p_value, 1.0);
  EXPECT_EQ(out.R, 500u);
  EXPECT_EQ(out.seed, 123u);
  // Replicate deltas are reproducible one by one from the pool and stream.
  std::vector<LockedPair> pool;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      if (!((i == 0 && j == 1) || (i == 2 && j == 5))) pool.push_back({i, j, 0, 0, 0});
    }
  }
  const double base = summarize_fit(m, 1.0, truth).mae;
  for (std::size_t r : {0u, 17u, 499u}) {
    auto rng = Xoshiro256StarStar::for_replicate(123, r);
    const auto picks = sample_without_replacement(rng, pool.size(), 2);
    const std::vector<LockedPair> chosen{pool[picks.at(0)], pool[picks.at(1)]};
    EXPECT_EQ(out.random_deltas[r], base - summarize_fit(downweight(m, chosen), 1.0, truth).mae);
  }
}

TEST(PermTest, PlantedLocksBeatEveryRandomDraw) {
  const auto m = planted_fixture();
  const auto truth = planted_truth();
  PermutationOptions o;
  o.replicates = 200;
  const auto out = perm_test(m, detect_locks(m, 0.7), 0.01, 1.0, truth, o);
  const double hi = *std::max_element(out.random_deltas.begin(), out.random_deltas.end());
  EXPECT_GT(out.delta_mae_lock, hi);
  EXPECT_EQ(out.p_value, 1.0 / 201.0);
}

TEST(PermTest, ThreadCountDoesNotMatter) {
  const auto m = planted_fixture();
  const auto truth = planted_truth();
  const auto locks = detect_locks(m, 0.7);
  PermutationOptions o;
  o.replicates = 300;
  const auto one = perm_test(m, locks, 0.01, 1.0, truth, o);
  for (unsigned t : {2u, 3u, 7u}) {
    o.threads = t;
    const auto many = perm_test(m, locks, 0.01, 1.0, truth, o);
    EXPECT_EQ(many.random_deltas, one.random_deltas);
    EXPECT_EQ(many.p_value, one.p_value);
  }
}

TEST(PermTest, Errors) {
  const auto m = planted_fixture();
  const auto truth = planted_truth();
  EXPECT_EQ(code_of([&] { perm_test(m, LockReport{0.9, {}}, 0.01, 1.0, truth); }),
            Errc::NoLockedPairs);
  LockReport all{0.51, {}};
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) all.pairs.push_back({i, j, 0.6, 0.6, 0.2});
  }
  all.pairs.resize(10);  // 10 locked, 5 left in the pool
  EXPECT_EQ(code_of([&] { perm_test(m, all, 0.01, 1.0, truth); }), Errc::PoolTooSmall);
}

}  // namespace
}  // namespace sft
