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

// Score files: one JSON object per line.
//
//   A/B:    {"category", "brand_a", "brand_b", "template_id", "model_id",
//            "variants_a": [[completion, logprob], ...], "variants_b": [...],
//            "swapped": false}
//   yes/no: {"probe_kind": "yesno", "category", "brand_a": i, "brand_b": j,
//            "model_id", "variants_yes": [...], "variants_no": [...]}
//
// A logprob is a number, null or the string "-inf" (the last two mean the
// completion has zero probability). Lines of the form {"header": {...}} carry
// scorer metadata and are skipped, as are blank lines.

#ifndef SFT_SCOREFILE_HPP_
#define SFT_SCOREFILE_HPP_

#include <istream>
#include <ostream>
#include <vector>

#include "sft/probes.hpp"

namespace sft {

// Throws SchemaViolation (with the 1-based line number) on malformed lines and
// DuplicateRecord when (model, kind, pair, template, swapped) repeats.
std::vector<ScoreRecord> parse_scores(std::istream& in);

// Writes one record as a single line, logprobs at full round-trip precision.
void write_score_record(std::ostream& out, const ScoreRecord& record);

}  // namespace sft

#endif  // SFT_SCOREFILE_HPP_
