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

#include "sft/fixtures.hpp"

#include <array>

#include <fmt/format.h>

#include "sft/error.hpp"

namespace sft {

namespace {

constexpr std::array<BrandShare, 10> kCsd{{
    {"Coca-Cola", 19.2, ""},
    {"Dr Pepper", 8.7, ""},
    {"Sprite", 8.03, ""},
    {"Pepsi-Cola", 7.97, ""},
    {"Diet Coke", 7.8, ""},
    {"Mountain Dew", 6.1, ""},
    {"Coke Zero Sugar", 4.2, ""},
    {"Diet Pepsi", 3.3, ""},
    {"Fanta", 2.9, ""},
    {"Ginger Ale", 2.3, "Canada Dry Ginger Ale"},
}};

constexpr std::array<BrandShare, 6> kEnergy{{
    {"Red Bull", 36.6, ""},
    {"Monster", 27.7, ""},
    {"Celsius", 11.8, ""},
    {"Alani Nu", 3.6, ""},
    {"Reign", 3.0, "Reign (Monster sub-brand)"},
    {"Rockstar", 3.41, ""},
}};

const std::array<CategoryFixture, 2> kCategories{{
    {"carbonated soft drink", "csd", kCsd},
    {"energy drink", "energy", kEnergy},
}};

// Row beats column.
constexpr double kPythiaP[10][10] = {
    {0.000, 0.770, 0.827, 0.786, 0.693, 0.710, 0.572, 0.728, 0.769, 0.788},
    {0.230, 0.000, 0.789, 0.693, 0.726, 0.674, 0.617, 0.726, 0.683, 0.729},
    {0.173, 0.211, 0.000, 0.775, 0.760, 0.746, 0.677, 0.751, 0.787, 0.828},
    {0.214, 0.307, 0.225, 0.000, 0.629, 0.622, 0.562, 0.621, 0.708, 0.714},
    {0.307, 0.274, 0.240, 0.371, 0.000, 0.626, 0.439, 0.578, 0.701, 0.692},
    {0.290, 0.326, 0.254, 0.378, 0.374, 0.000, 0.529, 0.623, 0.711, 0.679},
    {0.428, 0.383, 0.323, 0.438, 0.561, 0.471, 0.000, 0.626, 0.612, 0.676},
    {0.272, 0.274, 0.249, 0.379, 0.422, 0.377, 0.374, 0.000, 0.682, 0.687},
    {0.231, 0.317, 0.213, 0.292, 0.299, 0.289, 0.388, 0.318, 0.000, 0.694},
    {0.212, 0.271, 0.172, 0.286, 0.308, 0.321, 0.324, 0.313, 0.306, 0.000},
};

constexpr std::array<PublishedLock, 4> kGemmaLocks{{
    {"Coca-Cola", "Sprite", 0.72466, 0.67836, 0.4030},
    {"Sprite", "Pepsi-Cola", 0.6808, 0.6857, 0.3665},
    {"Coca-Cola", "Coke Zero Sugar", 0.6839, 0.6758, 0.3597},
    {"Coca-Cola", "Ginger Ale", 0.6763, 0.6759, 0.3522},
}};

}  // namespace

std::vector<std::string> CategoryFixture::brand_names() const {
  std::vector<std::string> out;
  out.reserve(brands.size());
  for (const auto& b : brands) out.emplace_back(b.brand);
  return out;
}

std::span<const CategoryFixture> categories() noexcept { return kCategories; }

const CategoryFixture& find_category(std::string_view name) {
  for (const auto& c : kCategories) {
    if (c.category == name || c.alias == name) return c;
  }
  throw Error(Errc::UnknownCategory, fmt::format("no category '{}'", name));
}

GroundTruth load_truth(std::string_view category) {
  const auto& c = find_category(category);
  Eigen::VectorXd raw(static_cast<Eigen::Index>(c.brands.size()));
  for (std::size_t i = 0; i < c.brands.size(); ++i) {
    raw(static_cast<Eigen::Index>(i)) = c.brands[i].share_pct;
  }
  return make_ground_truth(c.brand_names(), raw);
}

PairwiseMatrices pythia_csd_matrices() {
  PairwiseMatrices m;
  m.brands = find_category("csd").brand_names();
  m.P.resize(10, 10);
  m.C.resize(10, 10);
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      m.P(i, j) = kPythiaP[i][j];
      m.C(i, j) = i == j ? 0.0 : 11.0;
    }
  }
  return m;
}

std::span<const PublishedLock> gemma_csd_locks() noexcept { return kGemmaLocks; }

PairwiseMatrices gemma_lock_fixture() {
  PairwiseMatrices m = pythia_csd_matrices();
  const auto n = static_cast<Eigen::Index>(m.brands.size());
  Eigen::MatrixXd y(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      y(i, j) = i == j ? 0.0 : 0.40 + 0.02 * static_cast<double>((3 * i + 7 * j) % 12);
    }
  }
  auto index_of = [&](std::string_view brand) {
    for (std::size_t k = 0; k < m.brands.size(); ++k) {
      if (m.brands[k] == brand) return static_cast<Eigen::Index>(k);
    }
    throw Error(Errc::UnknownEntity, fmt::format("no brand '{}'", brand));
  };
  for (const auto& lock : kGemmaLocks) {
    const auto i = index_of(lock.brand_i);
    const auto j = index_of(lock.brand_j);
    y(i, j) = lock.y_ij;
    y(j, i) = lock.y_ji;
  }
  m.Y = std::move(y);
  return m;
}

}  // namespace sft
