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
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "sft/error.hpp"
#include "sft/fixtures.hpp"
#include "sft/scorefile.hpp"

namespace sft {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

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

ScoreRecord ab(std::string a, std::string b, int t, double pa) {
  ScoreRecord r;
  r.category = "carbonated soft drink";
  r.brand_a = std::move(a);
  r.brand_b = std::move(b);
  r.template_id = t;
  r.model_id = "m";
  r.variants_a = {{" A", std::log(pa)}, {"A", std::log(pa) - 2}};
  r.variants_b = {{" B", std::log1p(-pa)}, {"B", std::log1p(-pa) - 2}};
  return r;
}

TEST(Templates, ElevenStemsWithPlaceholders) {
  const auto ts = standard_templates();
  ASSERT_EQ(ts.size(), 11u);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_EQ(ts[i].id, static_cast<int>(i));
    EXPECT_NE(ts[i].stem.find("{cat}"), std::string_view::npos) << i;
  }
}

TEST(Render, CountsAndVerbatimText) {
  const auto ts = standard_templates();
  EXPECT_EQ(render_prompts("carbonated soft drink", {"Coca-Cola", "Sprite"}, ts).size(), 11u);
  const auto csd = find_category("csd").brand_names();
  const auto all = render_prompts("carbonated soft drink", csd, ts);
  ASSERT_EQ(all.size(), 495u);
  const auto& first = all.front();
  EXPECT_EQ(first.brand_a, "Coca-Cola");
  EXPECT_EQ(first.brand_b, "Dr Pepper");
  EXPECT_EQ(first.completions, (std::vector<std::string>{" A", "A", " B", "B"}));

  const auto t0 = render_ab(ts[0], "carbonated soft drink", "Coca-Cola", "Sprite");
  EXPECT_EQ(t0,
            "Which brand is a more typical example of a carbonated soft drink? Reply A or B "
            "only.\nA: Coca-Cola\nB: Sprite\nAnswer:");
  EXPECT_EQ(render_yes_no("carbonated soft drink", "Sprite", "Fanta"),
            "Is Sprite more typical of a carbonated soft drink than Fanta? Reply yes or no "
            "only:");
}

TEST(Render, PairOrderAndOptions) {
  const std::vector<std::string> b{"x", "y", "z"};
  const auto ts = standard_templates().first(2);
  const auto ps = render_prompts("cat", b, ts, {true, true});
  // 3 pairs x 2 templates x 2 orientations + 6 ordered yes/no pairs.
  ASSERT_EQ(ps.size(), 18u);
  EXPECT_EQ(ps[0].template_id, 0);
  EXPECT_EQ(ps[1].swapped, true);
  EXPECT_EQ(ps[1].brand_a, "y");
  EXPECT_EQ(ps[2].template_id, 1);
  EXPECT_EQ(ps.back().kind, ProbeKind::kYesNo);
  EXPECT_EQ(ps.back().completions, (std::vector<std::string>{" yes", "yes", " no", "no"}));
}

TEST(Render, Errors) {
  const auto ts = standard_templates();
  EXPECT_EQ(code_of([&] { render_prompts("", {"a", "b"}, ts); }), Errc::EmptyCategory);
  EXPECT_EQ(code_of([&] { render_prompts("c", {"a"}, ts); }), Errc::TooFewBrands);
  EXPECT_EQ(code_of([&] { render_prompts("c", {"a", "a"}, ts); }), Errc::DuplicateBrand);
}

TEST(Render, BatchIsJsonLines) {
  const auto ps = render_prompts("cat", {"x", "y"}, standard_templates().first(1), {true, false});
  std::stringstream ss;
  write_prompt_batch(ss, ps);
  std::string line;
  int n = 0;
  while (std::getline(ss, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("prompt"));
    ++n;
  }
  EXPECT_EQ(n, 3);
}

TEST(Reduce, MaxOverVariantsIgnoringOrder) {
  ScoreRecord r;
  r.variants_a = {{" A", -1.2}, {"A", -3.4}};
  r.variants_b = {{" B", -2.0}};
  EXPECT_EQ(reduce_variants(r), std::make_pair(-1.2, -2.0));
  std::reverse(r.variants_a.begin(), r.variants_a.end());
  EXPECT_EQ(reduce_variants(r).first, -1.2);
  r.variants_b.clear();
  EXPECT_EQ(code_of([&] { reduce_variants(r); }), Errc::NoVariants);
}

TEST(BinaryProb, ClosedForms) {
  EXPECT_EQ(binary_prob(-2.0, -2.0), 0.5);
  EXPECT_NEAR(binary_prob(std::log(3.0) - 5.0, -5.0), 0.75, 1e-15);
  const double tiny = binary_prob(-1000.0, 0.0);
  EXPECT_LT(tiny, 1e-300);
  EXPECT_TRUE(std::isfinite(tiny));
  EXPECT_EQ(binary_prob(-kInf, -3.0), 0.0);
  EXPECT_EQ(binary_prob(-3.0, -kInf), 1.0);
  EXPECT_EQ(code_of([] { binary_prob(-kInf, -kInf); }), Errc::BothNegInfinite);
}

TEST(BinaryProb, ComplementSumsToOne) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-60.0, 0.0);
  for (int t = 0; t < 10000; ++t) {
    const double a = u(rng);
    const double b = u(rng);
    ASSERT_NEAR(binary_prob(a, b) + binary_prob(b, a), 1.0, 1e-15);
  }
}

TEST(YesProb, FallbackAndClosedForm) {
  EXPECT_EQ(yes_prob(-1.0, -1.0), 0.5);
  EXPECT_EQ(yes_prob(-kInf, -kInf), 0.5);
  EXPECT_NEAR(yes_prob(std::log(9.0), 0.0), 0.9, 1e-15);
  EXPECT_EQ(yes_prob(NAN, -1.0), 0.5);
}

TEST(Fuse, MeansComplementsAndCounts) {
  std::vector<TemplateProb> probs;
  for (int t = 0; t < 11; ++t) {
    probs.push_back({0, 1, t, 0.5});
    probs.push_back({0, 2, t, 0.6 + 0.01 * (t - 5)});
    probs.push_back({1, 2, t, 0.3});
  }
  const auto m = fuse_templates({"a", "b", "c"}, probs);
  EXPECT_EQ(m.P(0, 1), 0.5);
  EXPECT_NEAR(m.P(0, 2), 0.6, 1e-15);
  EXPECT_EQ(m.P(2, 0), 1.0 - m.P(0, 2));
  EXPECT_EQ(m.C(1, 2), 11.0);
  EXPECT_EQ(m.C(2, 1), 11.0);
  EXPECT_EQ(m.C(1, 1), 0.0);
  m.validate(0.0);

  // Order of the input records does not change any bit of the result.
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(probs.begin(), probs.end(), rng);
    const auto m2 = fuse_templates({"a", "b", "c"}, probs);
    ASSERT_EQ(m2.P, m.P);
    ASSERT_EQ(m2.C, m.C);
  }
}

TEST(Fuse, RaggedAndDuplicate) {
  std::vector<TemplateProb> probs{{0, 1, 0, 0.5}, {0, 1, 1, 0.5}, {0, 2, 0, 0.5},
                                  {0, 2, 1, 0.5}, {1, 2, 0, 0.5}};
  EXPECT_EQ(code_of([&] { fuse_templates({"a", "b", "c"}, probs); }), Errc::RaggedTemplates);
  probs.push_back({1, 2, 2, 0.5});
  EXPECT_EQ(code_of([&] { fuse_templates({"a", "b", "c"}, probs); }), Errc::RaggedTemplates);
  probs.back().template_id = 0;
  EXPECT_EQ(code_of([&] { fuse_templates({"a", "b", "c"}, probs); }), Errc::DuplicateRecord);
}

TEST(Fuse, RandomInputsStayAntisymmetric) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 6;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("b" + std::to_string(i));
    std::vector<TemplateProb> probs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (int t = 0; t < 4; ++t) probs.push_back({i, j, t, u(rng)});
      }
    }
    const auto m = fuse_templates(names, probs);
    ASSERT_NO_THROW(m.validate(0.0));
    ASSERT_TRUE(m.C.isApprox(m.C.transpose(), 0.0));
  }
}

TEST(Aggregate, RecordsToMatrices) {
  std::vector<ScoreRecord> rs{ab("a", "b", 0, 0.7), ab("a", "b", 1, 0.9), ab("a", "c", 0, 0.2),
                              ab("a", "c", 1, 0.4), ab("b", "c", 0, 0.5), ab("b", "c", 1, 0.5)};
  auto m = aggregate_records(rs, {"a", "b", "c"});
  EXPECT_NEAR(m.P(0, 1), 0.8, 1e-12);
  EXPECT_NEAR(m.P(2, 0), 0.7, 1e-12);
  EXPECT_FALSE(m.Y.has_value());

  auto swapped = ab("b", "a", 0, 0.1);
  swapped.swapped = true;
  rs.push_back(swapped);
  EXPECT_NEAR(aggregate_records(rs, {"a", "b", "c"}).P(0, 1), 0.8, 1e-12);

  auto yn = rs.front();
  yn.kind = ProbeKind::kYesNo;
  yn.template_id.reset();
  std::vector<ScoreRecord> partial = rs;
  partial.push_back(yn);
  EXPECT_EQ(code_of([&] { aggregate_records(partial, {"a", "b", "c"}); }),
            Errc::IncompleteYesNo);

  std::vector<ScoreRecord> reversed{ab("b", "a", 0, 0.5)};
  EXPECT_EQ(code_of([&] { aggregate_records(reversed, {"a", "b"}); }), Errc::SchemaViolation);
}

TEST(Aggregate, PositionBias) {
  std::vector<ScoreRecord> rs{ab("a", "b", 0, 0.7)};
  EXPECT_FALSE(position_bias(rs, {"a", "b"}).has_value());
  auto s = ab("b", "a", 0, 0.5);
  s.swapped = true;
  rs.push_back(s);
  // Slot A favoured: 0.7 + 0.5 - 1 = 0.2, halved.
  EXPECT_NEAR(*position_bias(rs, {"a", "b"}), 0.1, 1e-12);
}

TEST(Aggregate, PythiaFixtureScoresReproducePublishedMatrices) {
  std::ifstream in(std::string(SFT_DATA_DIR) + "/pythia_csd/scores.jsonl");
  ASSERT_TRUE(in.good());
  const auto records = parse_scores(in);
  const auto m = aggregate_records(records, find_category("csd").brand_names());
  const auto ref = pythia_csd_matrices();
  EXPECT_LT((m.P - ref.P).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(m.C, ref.C);
  const double coke_row[] = {0.770, 0.827, 0.786, 0.693, 0.710, 0.572, 0.728, 0.769, 0.788};
  for (int j = 1; j < 10; ++j) EXPECT_NEAR(m.P(0, j), coke_row[j - 1], 1e-12);
  ASSERT_TRUE(m.Y.has_value());
  EXPECT_LT(m.Y->maxCoeff(), 0.65);
}

TEST(MatricesIo, SaveLoadRoundTrip) {
  auto m = gemma_lock_fixture();
  const auto dir = std::filesystem::temp_directory_path() / "sft_probes_io";
  std::filesystem::remove_all(dir);
  save_matrices(dir, m);
  const auto back = load_matrices(dir);
  EXPECT_EQ(back.brands, m.brands);
  EXPECT_LT((back.P - m.P).cwiseAbs().maxCoeff(), 1e-9);
  ASSERT_TRUE(back.Y.has_value());
  EXPECT_LT((*back.Y - *m.Y).cwiseAbs().maxCoeff(), 1e-9);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace sft
