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

// Typicality probes: prompt rendering, reduction of scored completions to
// pairwise probabilities, and fusion of templates into (P, C, Y).

#ifndef SFT_PROBES_HPP_
#define SFT_PROBES_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sft {

struct ProbeTemplate {
  int id;
  std::string_view stem;  // placeholders {cat}, {A}, {B}
};

// The eleven A/B question stems, ids 0..10.
std::span<const ProbeTemplate> standard_templates() noexcept;

inline constexpr std::string_view kAnswerBlock = "\nA: {A}\nB: {B}\nAnswer:";
inline constexpr std::string_view kYesNoStem =
    "Is {i} more typical of a {cat} than {j}? Reply yes or no only:";

enum class ProbeKind { kAB, kYesNo };

struct Prompt {
  ProbeKind kind = ProbeKind::kAB;
  std::string category;
  std::string brand_a;  // slot A, or i for yes/no
  std::string brand_b;  // slot B, or j for yes/no
  std::optional<int> template_id;
  std::string text;
  std::vector<std::string> answer_tokens;  // {"A","B"} or {"yes","no"}
  std::vector<std::string> completions;    // " A","A"," B","B" etc.
  bool swapped = false;                    // position-swap audit probe
};

struct RenderOptions {
  bool yes_no = false;      // add one yes/no probe per ordered pair
  bool swap_audit = false;  // add B-in-slot-A duplicates of every A/B probe
};

// One A/B prompt per unordered pair (i < j in list order, brand i in slot A)
// and template; pairs vary slowest.
std::vector<Prompt> render_prompts(std::string_view category,
                                   const std::vector<std::string>& brands,
                                   std::span<const ProbeTemplate> templates,
                                   RenderOptions options = {});

std::string render_ab(const ProbeTemplate& t, std::string_view category,
                      std::string_view a, std::string_view b);
std::string render_yes_no(std::string_view category, std::string_view i,
                          std::string_view j);

// Line-delimited JSON, one prompt per line.
void write_prompt_batch(std::ostream& out, std::span<const Prompt> prompts);

struct Variant {
  std::string completion;
  double logprob;

  friend bool operator==(const Variant&, const Variant&) = default;
};

struct ScoreRecord {
  ProbeKind kind = ProbeKind::kAB;
  std::string category;
  std::string brand_a;
  std::string brand_b;
  std::optional<int> template_id;  // A/B probes only
  std::string model_id;
  std::vector<Variant> variants_a;  // A answers, or "yes" for yes/no
  std::vector<Variant> variants_b;  // B answers, or "no"
  bool swapped = false;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

// (L_A, L_B): the best log-probability among each side's variants.
std::pair<double, double> reduce_variants(const ScoreRecord& record);

// Max-shifted two-way softmax e^(L_A-m) / (e^(L_A-m) + e^(L_B-m)).
double binary_prob(double l_a, double l_b);

// Same softmax for yes/no; degenerate inputs fall back to exactly 0.5.
double yes_prob(double l_yes, double l_no);

// Win-rate matrix P (row beats column), count matrix C and optional ordered
// yes-probability matrix Y over a fixed brand list.
struct PairwiseMatrices {
  std::vector<std::string> brands;
  Eigen::MatrixXd P;
  Eigen::MatrixXd C;
  std::optional<Eigen::MatrixXd> Y;

  [[nodiscard]] std::size_t size() const noexcept { return brands.size(); }

  // Checks P[i][j] + P[j][i] = 1 (within `tol`), zero diagonals, symmetric
  // non-negative C and Y in [0,1]. Throws on violation.
  void validate(double tol = 1e-6) const;
};

struct TemplateProb {
  std::size_t i;  // slot A brand index, i < j
  std::size_t j;
  int template_id;
  double p;  // Pr(A | i, j, template)
};

// P[i][j] = mean over templates, P[j][i] = 1 - P[i][j], C[i][j] = T. Every
// unordered pair must carry the same template set.
PairwiseMatrices fuse_templates(std::vector<std::string> brands,
                                std::span<const TemplateProb> probs);

// Reduces A/B records into P and C and yes/no records into Y. Swapped audit
// records are ignored. Brand order comes from `brands`.
PairwiseMatrices aggregate_records(std::span<const ScoreRecord> records,
                                   const std::vector<std::string>& brands);

// Mean slot-A bias (p + p_swapped - 1) / 2 over probes scored in both
// orientations; empty when no swapped records exist.
std::optional<double> position_bias(std::span<const ScoreRecord> records,
                                    const std::vector<std::string>& brands);

// P.csv, C.csv and (if present) Y.csv in `dir`; values at 9 decimals.
void save_matrices(const std::filesystem::path& dir, const PairwiseMatrices& m);
PairwiseMatrices load_matrices(const std::filesystem::path& dir);

}  // namespace sft

#endif  // SFT_PROBES_HPP_
