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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "sft/error.hpp"
#include "sft/fixtures.hpp"

namespace sft {
namespace {

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

// Straight transcription of the MM update with std::vector storage.
std::vector<double> mm_oracle(const std::vector<std::vector<double>>& P,
                              const std::vector<std::vector<double>>& C, int iters, double eps) {
  const std::size_t n = P.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < iters; ++it) {
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      double w = 0;
      double d = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        w += C[i][j] * P[i][j];
        d += C[i][j] / (pi[i] + pi[j] + eps);
      }
      next[i] = w / d;
    }
    const double s = std::accumulate(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) pi[i] = next[i] / s;
  }
  return pi;
}

// Spearman from the definition: Pearson correlation of average ranks, ranks
// found by counting.
double spearman_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double greater = 0;
      double equal = 0;
      for (double x : v) {
        greater += x > v[i];
        equal += x == v[i];
      }
      r[i] = greater + (equal + 1) / 2;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0;
  double saa = 0;
  double sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

TEST(BtlFit, SymmetricThreeItems) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Constant(3, 3, 0.5);
  P.diagonal().setZero();
  Eigen::MatrixXd C = Eigen::MatrixXd::Constant(3, 3, 11.0);
  C.diagonal().setZero();
  const auto r = btl_fit(P, C);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.pi(i), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(r.iterations, 300);
  EXPECT_EQ(r.epsilon, 1e-9);
}

TEST(BtlFit, TwoItemClosedForm) {
  Eigen::MatrixXd P(2, 2);
  P << 0, 0.75, 0.25, 0;
  Eigen::MatrixXd C(2, 2);
  C << 0, 11, 11, 0;
  const auto r = btl_fit(P, C);
  EXPECT_NEAR(r.pi(0), 0.75, 1e-6);
  EXPECT_NEAR(r.pi(1), 0.25, 1e-6);
}

TEST(BtlFit, MatchesOracleOnRandomMatrices) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_real_distribution<double> cu(0.5, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 9;
    std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> C(n, std::vector<double>(n, 0.0));
    Eigen::MatrixXd Pe = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd Ce = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        P[i][j] = u(rng);
        P[j][i] = 1.0 - P[i][j];
        C[i][j] = C[j][i] = cu(rng);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        Pe(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = P[i][j];
        Ce(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = C[i][j];
      }
    }
    const auto pi = btl_fit(Pe, Ce).pi;
    const auto oracle = mm_oracle(P, C, 300, 1e-9);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_NEAR(pi(static_cast<Eigen::Index>(i)), oracle[i], 1e-12);
    }
    ASSERT_NEAR(pi.sum(), 1.0, 1e-12);
    ASSERT_GT(pi.minCoeff(), 0.0);
  }
}

TEST(BtlFit, PermutationEquivariantAndDeterministic) {
  const auto m = pythia_csd_matrices();
  const auto base = btl_fit(m).pi;
  EXPECT_EQ(btl_fit(m).pi, base);  // bit-identical

  std::vector<int> perm{3, 7, 0, 9, 1, 5, 2, 8, 6, 4};
  Eigen::PermutationMatrix<Eigen::Dynamic> Q(10);
  for (int i = 0; i < 10; ++i) Q.indices()(i) = perm[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd P2 = Q * m.P * Q.transpose();
  const Eigen::MatrixXd C2 = Q * m.C * Q.transpose();
  const Eigen::VectorXd pi2 = btl_fit(P2, C2).pi;
  EXPECT_LT((pi2 - Q * base).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BtlFit, PythiaRanking) {
  const auto m = pythia_csd_matrices();
  const auto order = argsort_descending(btl_fit(m).pi);
  std::vector<std::string> names;
  for (auto i : order) names.push_back(m.brands[i]);
  EXPECT_EQ(names, (std::vector<std::string>{"Coca-Cola", "Dr Pepper", "Sprite", "Pepsi-Cola",
                                             "Coke Zero Sugar", "Diet Coke", "Mountain Dew",
                                             "Diet Pepsi", "Fanta", "Ginger Ale"}));
}

TEST(BtlFit, ZeroWinsWarnsAndFloors) {
  Eigen::MatrixXd P(3, 3);
  // Item 1 loses every comparison.
  P << 0, 1, 0.5, 0, 0, 0, 0.5, 1, 0;
  Eigen::MatrixXd C = Eigen::MatrixXd::Constant(3, 3, 4.0);
  C.diagonal().setZero();
  const auto r = btl_fit(P, C);
  EXPECT_EQ(r.warnings.size(), 1u);
  EXPECT_GT(r.pi(1), 0.0);
  EXPECT_NEAR(r.pi.sum(), 1.0, 1e-12);
}

TEST(BtlFit, Errors) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Constant(4, 4, 0.5);
  P.diagonal().setZero();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(4, 4);
  C(0, 1) = C(1, 0) = 1;
  C(2, 3) = C(3, 2) = 1;
  EXPECT_EQ(code_of([&] { btl_fit(P, C); }), Errc::DisconnectedComparisonGraph);
  EXPECT_EQ(code_of([&] { btl_fit(P, Eigen::MatrixXd::Zero(3, 3)); }), Errc::ShapeMismatch);
}

TEST(ApplyPower, Examples) {
  const auto p = vec({0.8, 0.2});
  EXPECT_LT((apply_power(p, 1.0) - p).cwiseAbs().maxCoeff(), 1e-15);
  const auto q = apply_power(p, 2.0);
  EXPECT_NEAR(q(0), 0.64 / 0.68, 1e-12);
  EXPECT_NEAR(q(1), 0.04 / 0.68, 1e-12);
  EXPECT_NEAR(q(0), 0.941176, 1e-6);
  EXPECT_EQ(code_of([&] { apply_power(p, 0.0); }), Errc::GammaNonPositive);
  EXPECT_EQ(code_of([&] { apply_power(p, -1.0); }), Errc::GammaNonPositive);
}

TEST(ApplyPower, PreservesRankingAndSpearman) {
  std::mt19937_64 rng(59);
  std::gamma_distribution<double> g(1.0, 1.0);
  const auto grid = calibration_grid();
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd p(12);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = g(rng);
    p /= p.sum();
    const auto before = argsort_descending(p);
    const Eigen::VectorXd truth = Eigen::VectorXd::LinSpaced(12, 20, 1);
    const double rho = spearman(p, truth);
    const double gamma = grid[static_cast<std::size_t>(trial) % grid.size()];
    const auto q = apply_power(p, gamma);
    ASSERT_EQ(argsort_descending(q), before);
    ASSERT_EQ(spearman(q, truth), rho);
  }
}

TEST(Calibration, GridShape) {
  const auto grid = calibration_grid();
  ASSERT_EQ(grid.size(), 200u);
  EXPECT_EQ(grid.front(), 0.2);
  EXPECT_EQ(grid.back(), 5.0);
  EXPECT_NEAR(grid[1] - grid[0], 4.8 / 199, 1e-15);
}

TEST(Calibration, PerfectMatchPicksOne) {
  const auto truth = make_ground_truth({"a", "b", "c", "d"}, vec({40, 30, 20, 10}));
  const auto r = power_calibrate(truth.shares_pct / 100.0, truth);
  EXPECT_NEAR(r.gamma, 1.0, 4.8 / 199);
  EXPECT_LT(r.mae_at_gamma, 0.3);
  EXPECT_EQ(r.mae.size(), 200u);
  const auto best = std::min_element(r.mae.begin(), r.mae.end());
  EXPECT_EQ(r.gamma, r.grid[static_cast<std::size_t>(best - r.mae.begin())]);
}

TEST(Calibration, TiesGoToSmallerGamma) {
  // Uniform p is a fixed point of every power map, so all MAEs tie.
  const auto truth = make_ground_truth({"a", "b"}, vec({70, 30}));
  const auto r = power_calibrate(vec({0.5, 0.5}), truth);
  EXPECT_EQ(r.gamma, 0.2);
}

TEST(Calibration, HoldoutMask) {
  const auto truth = make_ground_truth({"a", "b", "c"}, vec({60, 30, 10}));
  const auto p = vec({0.5, 0.3, 0.2});
  const auto all = power_calibrate(p, truth);
  const auto some = power_calibrate(p, truth, std::vector<bool>{false, false, true});
  // Grid minimizers found by brute force offline: k = 59 and k = 78.
  EXPECT_DOUBLE_EQ(all.gamma, 0.2 + 4.8 * 59 / 199);
  EXPECT_DOUBLE_EQ(some.gamma, 0.2 + 4.8 * 78 / 199);
  EXPECT_EQ(code_of([&] { power_calibrate(p, truth, std::vector<bool>{true}); }),
            Errc::LengthMismatch);
  EXPECT_EQ(code_of([&] { power_calibrate(vec({1.0}), truth); }), Errc::LengthMismatch);
}

TEST(Spearman, Examples) {
  const auto a = vec({1, 2, 3, 4, 5});
  EXPECT_EQ(spearman(a, a), 1.0);
  EXPECT_EQ(spearman(a, vec({5, 4, 3, 2, 1})), -1.0);
  EXPECT_EQ(code_of([&] { spearman(a, vec({1, 2})); }), Errc::LengthMismatch);
  // One 3-cycle displacement over ten items: sum d^2 = 6.
  const auto truth = vec({10, 9, 8, 7, 6, 5, 4, 3, 2, 1});
  const auto pred = vec({10, 9, 8, 7, 5, 4, 6, 3, 2, 1});
  EXPECT_NEAR(spearman(pred, truth), 1.0 - 36.0 / 990.0, 1e-15);
}

TEST(Spearman, MatchesOracleWithAndWithoutTies) {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> d(0, 6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 12;
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = trial % 2 ? d(rng) : u(rng);
      b[i] = trial % 3 ? d(rng) : u(rng);
    }
    const Eigen::Map<Eigen::VectorXd> av(a.data(), static_cast<Eigen::Index>(n));
    const Eigen::Map<Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(n));
    const double got = spearman(av, bv);
    const double want = spearman_oracle(a, b);
    if (std::isnan(want)) {
      ASSERT_TRUE(std::isnan(got));
    } else {
      ASSERT_NEAR(got, want, 1e-12);
    }
  }
}

TEST(MaePp, Examples) {
  const auto truth = make_ground_truth({"a", "b"}, vec({60, 40}));
  EXPECT_EQ(mae_pp(truth.shares_pct / 100.0, truth), 0.0);
  EXPECT_NEAR(mae_pp(vec({0.5, 0.5}), truth), 10.0, 1e-12);
  EXPECT_EQ(code_of([&] { mae_pp(vec({1.0}), truth); }), Errc::LengthMismatch);
}

TEST(MaePp, GemmaPreLockTable) {
  const auto truth = load_truth("csd");
  const Eigen::VectorXd pred = vec({21.123, 21.031, 12.794, 10.405, 7.722, 6.843, 6.761, 4.837, 5.229,
                         3.255}) /
                    100.0;
  EXPECT_NEAR(mae_pp(pred, truth), 2.434, 5e-4);
  EXPECT_NEAR(spearman(pred, truth.shares_pct), 0.988, 5e-4);
}

TEST(GroundTruth, Normalization) {
  const auto t = make_ground_truth({"solo"}, vec({3.5}));
  EXPECT_EQ(t.shares_pct(0), 100.0);
  EXPECT_EQ(code_of([] { make_ground_truth({"a"}, vec({1, 2})); }), Errc::LengthMismatch);
  const auto twice = make_ground_truth(t.brands, t.shares_pct);
  EXPECT_EQ(twice.shares_pct, t.shares_pct);
}

}  // namespace
}  // namespace sft
