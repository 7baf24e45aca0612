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

// Built-in reference data: category brand lists with their 2024 U.S.
// all-channel shares, and the published soft-drink probe matrices.

#ifndef SFT_FIXTURES_HPP_
#define SFT_FIXTURES_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sft/btl.hpp"
#include "sft/probes.hpp"

namespace sft {

struct BrandShare {
  std::string_view brand;   // verbatim prompt token
  double share_pct;         // share as reported, before renormalization
  std::string_view source;  // where the share comes from, when not the token
};

struct CategoryFixture {
  std::string_view category;  // verbatim prompt token
  std::string_view alias;     // short CLI name
  std::span<const BrandShare> brands;

  [[nodiscard]] std::vector<std::string> brand_names() const;
};

std::span<const CategoryFixture> categories() noexcept;

// Looks up by category token or alias; throws UnknownCategory.
const CategoryFixture& find_category(std::string_view name);

// Ground truth normalized to sum to 100 over the fixture's brands.
GroundTruth load_truth(std::string_view category);

// Soft-drink win-rate matrix P (row beats column, 3 decimals) and C = 11 off
// the diagonal, as scored by EleutherAI/pythia-160m over 11 templates.
PairwiseMatrices pythia_csd_matrices();

struct PublishedLock {
  std::string_view brand_i;
  std::string_view brand_j;
  double y_ij;
  double y_ji;
  double sum_minus_1;  // as printed (4 decimals)
};

// The four google/gemma-3-270m soft-drink locks at tau = 0.67. y values carry
// one extra digit where needed so all printed digits are reproduced.
std::span<const PublishedLock> gemma_csd_locks() noexcept;

// Soft-drink matrices with the gemma locks embedded in an otherwise
// sub-threshold (< 0.63) Y. P and C are the pythia ones.
PairwiseMatrices gemma_lock_fixture();

}  // namespace sft

#endif  // SFT_FIXTURES_HPP_
