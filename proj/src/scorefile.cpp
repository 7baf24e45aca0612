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

#include "sft/scorefile.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "sft/error.hpp"

namespace sft {

namespace {

using nlohmann::json;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void violation(std::size_t line, std::string_view what) {
  throw Error(Errc::SchemaViolation, fmt::format("line {}: {}", line, what));
}

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) violation(line, fmt::format("missing key '{}'", key));
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_string()) violation(line, fmt::format("'{}' must be a string", key));
  auto s = v.get<std::string>();
  if (s.empty()) violation(line, fmt::format("'{}' must not be empty", key));
  return s;
}

double parse_logprob(const json& v, std::size_t line) {
  if (v.is_null()) return kNegInf;
  if (v.is_number()) {
    const double x = v.get<double>();
    if (std::isnan(x) || x > 0.0) violation(line, "logprob must be <= 0");
    return x;
  }
  if (v.is_string() && v.get<std::string>() == "-inf") return kNegInf;
  violation(line, "logprob must be a number, null or \"-inf\"");
}

std::vector<Variant> parse_variants(const json& obj, const char* key, std::size_t line) {
  const auto& arr = require(obj, key, line);
  if (!arr.is_array()) violation(line, fmt::format("'{}' must be an array", key));
  std::vector<Variant> out;
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string()) {
      violation(line, fmt::format("'{}' entries must be [completion, logprob]", key));
    }
    out.push_back({item[0].get<std::string>(), parse_logprob(item[1], line)});
  }
  if (out.empty()) violation(line, fmt::format("'{}' is empty", key));
  return out;
}

json variants_json(const std::vector<Variant>& vs) {
  json arr = json::array();
  for (const auto& v : vs) {
    if (std::isinf(v.logprob) && v.logprob < 0) {
      arr.push_back(json::array({v.completion, "-inf"}));
    } else {
      arr.push_back(json::array({v.completion, v.logprob}));
    }
  }
  return arr;
}

}  // namespace

std::vector<ScoreRecord> parse_scores(std::istream& in) {
  std::vector<ScoreRecord> out;
  std::set<std::tuple<std::string, int, std::string, std::string, int, bool>> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      violation(line, "not valid JSON");
    }
    if (!obj.is_object()) violation(line, "record must be an object");
    if (obj.contains("header")) continue;

    ScoreRecord r;
    if (auto it = obj.find("probe_kind"); it != obj.end()) {
      if (!it->is_string()) violation(line, "'probe_kind' must be a string");
      const auto kind = it->get<std::string>();
      if (kind == "yesno") {
        r.kind = ProbeKind::kYesNo;
      } else if (kind != "ab") {
        violation(line, fmt::format("unknown probe_kind '{}'", kind));
      }
    }
    r.category = require_string(obj, "category", line);
    r.brand_a = require_string(obj, "brand_a", line);
    r.brand_b = require_string(obj, "brand_b", line);
    r.model_id = require_string(obj, "model_id", line);
    if (r.brand_a == r.brand_b) violation(line, "brand_a equals brand_b");
    if (r.kind == ProbeKind::kAB) {
      const auto& t = require(obj, "template_id", line);
      if (!t.is_number_integer()) violation(line, "'template_id' must be an integer");
      r.template_id = t.get<int>();
      r.variants_a = parse_variants(obj, "variants_a", line);
      r.variants_b = parse_variants(obj, "variants_b", line);
    } else {
      r.variants_a = parse_variants(obj, "variants_yes", line);
      r.variants_b = parse_variants(obj, "variants_no", line);
    }
    if (auto it = obj.find("swapped"); it != obj.end()) {
      if (!it->is_boolean()) violation(line, "'swapped' must be a boolean");
      r.swapped = it->get<bool>();
    }

    auto key = std::make_tuple(r.model_id, static_cast<int>(r.kind), r.brand_a, r.brand_b,
                               r.template_id.value_or(-1), r.swapped);
    if (!seen.insert(std::move(key)).second) {
      throw Error(Errc::DuplicateRecord,
                  fmt::format("line {}: duplicate record for ({}, {}){}", line, r.brand_a,
                              r.brand_b,
                              r.template_id ? fmt::format(" template {}", *r.template_id) : ""));
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_score_record(std::ostream& out, const ScoreRecord& r) {
  nlohmann::ordered_json j;
  if (r.kind == ProbeKind::kYesNo) j["probe_kind"] = "yesno";
  j["category"] = r.category;
  j["brand_a"] = r.brand_a;
  j["brand_b"] = r.brand_b;
  if (r.kind == ProbeKind::kAB) j["template_id"] = r.template_id.value_or(0);
  j["model_id"] = r.model_id;
  if (r.kind == ProbeKind::kAB) {
    j["variants_a"] = variants_json(r.variants_a);
    j["variants_b"] = variants_json(r.variants_b);
    if (r.swapped) j["swapped"] = true;
  } else {
    j["variants_yes"] = variants_json(r.variants_a);
    j["variants_no"] = variants_json(r.variants_b);
  }
  out << j.dump() << '\n';
}

}  // namespace sft
