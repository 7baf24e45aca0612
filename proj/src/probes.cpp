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

#include "sft/probes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "sft/error.hpp"
#include "sft/matrix_io.hpp"

namespace sft {

namespace {

constexpr std::array<ProbeTemplate, 11> kTemplates{{
    {0, "Which brand is a more typical example of a {cat}? Reply A or B only."},
    {1, "Which brand is a more iconic example of a {cat}? Reply A or B only."},
    {2, "Which brand is a more marquee example of a {cat}? Reply A or B only."},
    {3, "Which brand is the flagship {cat} brand? Reply A or B only."},
    {4, "Which brand is the more recognizable example of a {cat}? Reply A or B only."},
    {5, "Which brand is the more famous example of a {cat}? Reply A or B only."},
    {6, "Which brand is the more standout example of a {cat}? Reply A or B only."},
    {7, "Which brand is the more influential example of a {cat}? Reply A or B only."},
    {8, "Which brand is the more notable example of a {cat}? Reply A or B only."},
    {9, "Which brand is the more popular example of a {cat}? Reply A or B only."},
    {10, "Which brand is the more widely known example of a {cat}? Reply A or B only."},
}};

void replace_all(std::string& s, std::string_view key, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = s.find(key, pos)) != std::string::npos) {
    s.replace(pos, key.size(), value);
    pos += value.size();
  }
}

std::vector<std::string> completions_for(std::string_view a, std::string_view b) {
  return {fmt::format(" {}", a), std::string(a), fmt::format(" {}", b), std::string(b)};
}

std::unordered_map<std::string, std::size_t> index_brands(
    const std::vector<std::string>& brands) {
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < brands.size(); ++i) {
    if (!idx.emplace(brands[i], i).second) {
      throw Error(Errc::DuplicateBrand, fmt::format("brand '{}' listed twice", brands[i]));
    }
  }
  return idx;
}

std::size_t brand_index(const std::unordered_map<std::string, std::size_t>& idx,
                        const std::string& brand) {
  auto it = idx.find(brand);
  if (it == idx.end()) {
    throw Error(Errc::SchemaViolation, fmt::format("unknown brand '{}'", brand));
  }
  return it->second;
}

}  // namespace

std::span<const ProbeTemplate> standard_templates() noexcept { return kTemplates; }

std::string render_ab(const ProbeTemplate& t, std::string_view category,
                      std::string_view a, std::string_view b) {
  std::string out(t.stem);
  out += kAnswerBlock;
  replace_all(out, "{cat}", category);
  // Substitute slots one at a time so a brand containing "{B}" is left alone.
  const auto pos_a = out.find("{A}");
  out.replace(pos_a, 3, a);
  const auto pos_b = out.find("{B}", pos_a + a.size());
  out.replace(pos_b, 3, b);
  return out;
}

std::string render_yes_no(std::string_view category, std::string_view i,
                          std::string_view j) {
  std::string out(kYesNoStem);
  const auto pos_i = out.find("{i}");
  out.replace(pos_i, 3, i);
  const auto pos_cat = out.find("{cat}", pos_i + i.size());
  out.replace(pos_cat, 5, category);
  const auto pos_j = out.find("{j}", pos_cat + category.size());
  out.replace(pos_j, 3, j);
  return out;
}

std::vector<Prompt> render_prompts(std::string_view category,
                                   const std::vector<std::string>& brands,
                                   std::span<const ProbeTemplate> templates,
                                   RenderOptions options) {
  if (category.empty()) throw Error(Errc::EmptyCategory, "category is empty");
  if (brands.size() < 2) {
    throw Error(Errc::TooFewBrands, fmt::format("need >= 2 brands, got {}", brands.size()));
  }
  index_brands(brands);

  std::vector<Prompt> out;
  const std::string cat(category);
  for (std::size_t i = 0; i < brands.size(); ++i) {
    for (std::size_t j = i + 1; j < brands.size(); ++j) {
      for (const auto& t : templates) {
        out.push_back({ProbeKind::kAB, cat, brands[i], brands[j], t.id,
                       render_ab(t, category, brands[i], brands[j]),
                       {"A", "B"}, completions_for("A", "B"), false});
        if (options.swap_audit) {
          out.push_back({ProbeKind::kAB, cat, brands[j], brands[i], t.id,
                         render_ab(t, category, brands[j], brands[i]),
                         {"A", "B"}, completions_for("A", "B"), true});
        }
      }
    }
  }
  if (options.yes_no) {
    for (std::size_t i = 0; i < brands.size(); ++i) {
      for (std::size_t j = 0; j < brands.size(); ++j) {
        if (i == j) continue;
        out.push_back({ProbeKind::kYesNo, cat, brands[i], brands[j], std::nullopt,
                       render_yes_no(category, brands[i], brands[j]),
                       {"yes", "no"}, completions_for("yes", "no"), false});
      }
    }
  }
  return out;
}

void write_prompt_batch(std::ostream& out, std::span<const Prompt> prompts) {
  for (const auto& p : prompts) {
    nlohmann::ordered_json j;
    j["probe_kind"] = p.kind == ProbeKind::kAB ? "ab" : "yesno";
    j["category"] = p.category;
    j["brand_a"] = p.brand_a;
    j["brand_b"] = p.brand_b;
    if (p.template_id) j["template_id"] = *p.template_id;
    if (p.swapped) j["swapped"] = true;
    j["prompt"] = p.text;
    j["answer_tokens"] = p.answer_tokens;
    j["completions"] = p.completions;
    out << j.dump() << '\n';
  }
}

std::pair<double, double> reduce_variants(const ScoreRecord& record) {
  if (record.variants_a.empty() || record.variants_b.empty()) {
    throw Error(Errc::NoVariants, "record has an empty variant list");
  }
  auto best = [](const std::vector<Variant>& vs) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& v : vs) m = std::max(m, v.logprob);
    return m;
  };
  return {best(record.variants_a), best(record.variants_b)};
}

double binary_prob(double l_a, double l_b) {
  if (std::isinf(l_a) && l_a < 0 && std::isinf(l_b) && l_b < 0) {
    throw Error(Errc::BothNegInfinite, "both answer log-probabilities are -inf");
  }
  const double m = std::max(l_a, l_b);
  const double ea = std::exp(l_a - m);
  const double eb = std::exp(l_b - m);
  return ea / (ea + eb);
}

double yes_prob(double l_yes, double l_no) {
  const double m = std::max(l_yes, l_no);
  if (!std::isfinite(m)) return 0.5;
  const double ey = std::exp(l_yes - m);
  const double en = std::exp(l_no - m);
  const double den = ey + en;
  if (!(den > 0.0) || !std::isfinite(den)) return 0.5;
  const double y = ey / den;
  return std::isfinite(y) ? y : 0.5;
}

void PairwiseMatrices::validate(double tol) const {
  const auto n = static_cast<Eigen::Index>(brands.size());
  auto check_shape = [&](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != n || m.cols() != n) {
      throw Error(Errc::ShapeMismatch,
                  fmt::format("{} is {}x{}, expected {}x{}", name, m.rows(), m.cols(), n, n));
    }
  };
  check_shape(P, "P");
  check_shape(C, "C");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (P(i, i) != 0.0) throw Error(Errc::InvalidArgument, "P diagonal must be 0");
    if (C(i, i) != 0.0) throw Error(Errc::InvalidArgument, "C diagonal must be 0");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!(P(i, j) >= 0.0 && P(i, j) <= 1.0)) {
        throw Error(Errc::OutOfRange, fmt::format("P({},{}) outside [0,1]", i, j));
      }
      if (std::abs(P(i, j) + P(j, i) - 1.0) > tol) {
        throw Error(Errc::InvalidArgument,
                    fmt::format("P({0},{1}) + P({1},{0}) != 1", i, j));
      }
      if (!(C(i, j) >= 0.0) || C(i, j) != C(j, i)) {
        throw Error(Errc::InvalidArgument,
                    fmt::format("C must be symmetric and non-negative at ({},{})", i, j));
      }
    }
  }
  if (Y) {
    check_shape(*Y, "Y");
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j && !((*Y)(i, j) >= 0.0 && (*Y)(i, j) <= 1.0)) {
          throw Error(Errc::OutOfRange, fmt::format("Y({},{}) outside [0,1]", i, j));
        }
      }
    }
  }
}

PairwiseMatrices fuse_templates(std::vector<std::string> brands,
                                std::span<const TemplateProb> probs) {
  const std::size_t n = brands.size();
  index_brands(brands);
  // template id -> p, ordered so the mean is summed in a fixed order
  std::map<std::pair<std::size_t, std::size_t>, std::map<int, double>> by_pair;
  for (const auto& tp : probs) {
    if (tp.i >= tp.j || tp.j >= n) {
      throw Error(Errc::InvalidArgument,
                  fmt::format("pair ({}, {}) must satisfy i < j < {}", tp.i, tp.j, n));
    }
    if (!by_pair[{tp.i, tp.j}].emplace(tp.template_id, tp.p).second) {
      throw Error(Errc::DuplicateRecord,
                  fmt::format("pair ({}, {}) template {} given twice", tp.i, tp.j,
                              tp.template_id));
    }
  }

  PairwiseMatrices m;
  const auto ni = static_cast<Eigen::Index>(n);
  m.P = Eigen::MatrixXd::Zero(ni, ni);
  m.C = Eigen::MatrixXd::Zero(ni, ni);
  if (n < 2) {
    m.brands = std::move(brands);
    return m;
  }

  const auto& reference = by_pair.begin()->second;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto it = by_pair.find({i, j});
      const bool same =
          it != by_pair.end() && it->second.size() == reference.size() &&
          std::equal(it->second.begin(), it->second.end(), reference.begin(),
                     [](const auto& a, const auto& b) { return a.first == b.first; });
      if (!same) {
        throw Error(Errc::RaggedTemplates,
                    fmt::format("pair ({}, {}) does not carry the common template set "
                                "of {} templates",
                                brands[i], brands[j], reference.size()));
      }
      double sum = 0.0;
      for (const auto& [id, p] : it->second) sum += p;
      const auto t = static_cast<double>(it->second.size());
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      m.P(a, b) = sum / t;
      m.P(b, a) = 1.0 - m.P(a, b);
      m.C(a, b) = t;
      m.C(b, a) = t;
    }
  }
  m.brands = std::move(brands);
  return m;
}

PairwiseMatrices aggregate_records(std::span<const ScoreRecord> records,
                                   const std::vector<std::string>& brands) {
  const auto idx = index_brands(brands);
  const std::size_t n = brands.size();
  std::vector<TemplateProb> probs;
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n),
                                                std::numeric_limits<double>::quiet_NaN());
  std::size_t yes_no_count = 0;
  for (const auto& r : records) {
    if (r.swapped) continue;
    const std::size_t a = brand_index(idx, r.brand_a);
    const std::size_t b = brand_index(idx, r.brand_b);
    if (a == b) throw Error(Errc::SchemaViolation, "record compares a brand with itself");
    const auto [la, lb] = reduce_variants(r);
    if (r.kind == ProbeKind::kAB) {
      if (a > b) {
        throw Error(Errc::SchemaViolation,
                    fmt::format("'{}' must occupy slot A ahead of '{}'", r.brand_b,
                                r.brand_a));
      }
      probs.push_back({a, b, r.template_id.value_or(0), binary_prob(la, lb)});
    } else {
      auto& cell = y(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (!std::isnan(cell)) {
        throw Error(Errc::DuplicateRecord,
                    fmt::format("yes/no probe ({}, {}) given twice", r.brand_a, r.brand_b));
      }
      cell = yes_prob(la, lb);
      ++yes_no_count;
    }
  }
  PairwiseMatrices m = fuse_templates(brands, probs);
  if (yes_no_count > 0) {
    if (yes_no_count != n * (n - 1)) {
      throw Error(Errc::IncompleteYesNo,
                  fmt::format("{} yes/no probes for {} ordered pairs", yes_no_count,
                              n * (n - 1)));
    }
    y.diagonal().setZero();
    m.Y = std::move(y);
  }
  return m;
}

std::optional<double> position_bias(std::span<const ScoreRecord> records,
                                    const std::vector<std::string>& brands) {
  const auto idx = index_brands(brands);
  using Key = std::tuple<std::size_t, std::size_t, int, std::string>;
  std::map<Key, double> canonical;
  std::map<Key, double> swapped;
  for (const auto& r : records) {
    if (r.kind != ProbeKind::kAB) continue;
    const std::size_t a = brand_index(idx, r.brand_a);
    const std::size_t b = brand_index(idx, r.brand_b);
    const auto [la, lb] = reduce_variants(r);
    const double p = binary_prob(la, lb);
    const int t = r.template_id.value_or(0);
    if (r.swapped) {
      swapped[{std::min(a, b), std::max(a, b), t, r.model_id}] = p;
    } else {
      canonical[{a, b, t, r.model_id}] = p;
    }
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [key, p] : canonical) {
    auto it = swapped.find(key);
    if (it == swapped.end()) continue;
    sum += 0.5 * (p + it->second - 1.0);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

void save_matrices(const std::filesystem::path& dir, const PairwiseMatrices& m) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const Eigen::MatrixXd& values) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      throw Error(Errc::IoError, fmt::format("cannot write '{}'", (dir / name).string()));
    }
    write_labeled_matrix(out, m.brands, values, 9);
  };
  write("P.csv", m.P);
  write("C.csv", m.C);
  if (m.Y) write("Y.csv", *m.Y);
}

PairwiseMatrices load_matrices(const std::filesystem::path& dir) {
  auto p = read_labeled_matrix_file(dir / "P.csv");
  auto c = read_labeled_matrix_file(dir / "C.csv");
  if (c.labels != p.labels) {
    throw Error(Errc::RegistryMismatch, "P.csv and C.csv list different brands");
  }
  PairwiseMatrices m{std::move(p.labels), std::move(p.values), std::move(c.values),
                     std::nullopt};
  if (std::filesystem::exists(dir / "Y.csv")) {
    auto y = read_labeled_matrix_file(dir / "Y.csv");
    if (y.labels != m.brands) {
      throw Error(Errc::RegistryMismatch, "Y.csv lists different brands");
    }
    m.Y = std::move(y.values);
  }
  m.validate();
  return m;
}

}  // namespace sft
