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

// Similarity fields over a finite, ordered entity registry.
//
// A similarity field is a directed map S: U x U -> [0,1] with S(E,E) = 1.
// Neither symmetry nor transitivity is assumed. Fibres are the closed
// superlevel sets F_alpha(K) = {E : S(E,K) >= alpha} of the column S(., K).
//
// Everything here is header-only and templated on the scalar type; the
// `SimilarityField` alias fixes it to double.

#ifndef SFT_FIELD_HPP_
#define SFT_FIELD_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "sft/error.hpp"

namespace sft {

struct EntityId {
  std::size_t index = 0;
  std::string label;

  friend bool operator==(const EntityId&, const EntityId&) = default;
};

// Ordered set of unique, non-empty labels.
class EntityRegistry {
 public:
  EntityRegistry() = default;

  explicit EntityRegistry(std::vector<std::string> labels)
      : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i].empty()) {
        throw Error(Errc::InvalidArgument,
                    fmt::format("empty entity label at index {}", i));
      }
      if (!lookup_.emplace(labels_[i], i).second) {
        throw Error(Errc::DuplicateEntity,
                    fmt::format("label '{}' appears twice", labels_[i]));
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept {
    return labels_;
  }

  [[nodiscard]] EntityId at(std::size_t index) const {
    if (index >= labels_.size()) {
      throw Error(Errc::UnknownEntity,
                  fmt::format("index {} outside registry of size {}", index,
                              labels_.size()));
    }
    return {index, labels_[index]};
  }

  [[nodiscard]] EntityId find(const std::string& label) const {
    auto it = lookup_.find(label);
    if (it == lookup_.end()) {
      throw Error(Errc::UnknownEntity, fmt::format("no entity '{}'", label));
    }
    return {it->second, label};
  }

  [[nodiscard]] bool contains(const EntityId& id) const noexcept {
    return id.index < labels_.size() && labels_[id.index] == id.label;
  }

  // Throws UnknownEntity unless `id` names a member of this registry.
  void check(const EntityId& id) const {
    if (!contains(id)) {
      throw Error(Errc::UnknownEntity,
                  fmt::format("entity ({}, '{}') not in registry", id.index,
                              id.label));
    }
  }

  friend bool operator==(const EntityRegistry& a, const EntityRegistry& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

template <typename Scalar>
class BasicSimilarityField {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  // Validating constructor. Reflexivity is checked exactly.
  BasicSimilarityField(EntityRegistry entities, Matrix values)
      : entities_(std::move(entities)), values_(std::move(values)) {
    const auto n = static_cast<Eigen::Index>(entities_.size());
    if (values_.rows() != values_.cols() || values_.rows() != n) {
      throw Error(Errc::ShapeMismatch,
                  fmt::format("values are {}x{} but registry has {} entities",
                              values_.rows(), values_.cols(), n));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (values_(i, i) != Scalar(1)) {
        throw Error(Errc::DiagonalNotOne,
                    fmt::format("S({0},{0}) != 1 for '{1}'", i,
                                entities_.labels()[static_cast<std::size_t>(i)]));
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const Scalar v = values_(i, j);
        if (!(v >= Scalar(0) && v <= Scalar(1))) {
          throw Error(Errc::OutOfRange,
                      fmt::format("S({},{}) outside [0,1]", i, j));
        }
      }
    }
  }

  [[nodiscard]] const EntityRegistry& entities() const noexcept { return entities_; }
  [[nodiscard]] const Matrix& values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return entities_.size(); }

  // S(a, b): how similar `a` is to `b`, with `b` acting as the reference.
  [[nodiscard]] Scalar operator()(const EntityId& a, const EntityId& b) const {
    entities_.check(a);
    entities_.check(b);
    return values_(static_cast<Eigen::Index>(a.index),
                   static_cast<Eigen::Index>(b.index));
  }

  friend bool operator==(const BasicSimilarityField& a,
                         const BasicSimilarityField& b) {
    return a.entities_ == b.entities_ && a.values_ == b.values_;
  }

 private:
  EntityRegistry entities_;
  Matrix values_;
};

using SimilarityField = BasicSimilarityField<double>;

template <typename Scalar>
BasicSimilarityField<Scalar> make_field(
    std::vector<std::string> labels,
    typename BasicSimilarityField<Scalar>::Matrix values) {
  return BasicSimilarityField<Scalar>(EntityRegistry(std::move(labels)),
                                      std::move(values));
}

inline SimilarityField make_field(std::vector<std::string> labels,
                                  Eigen::MatrixXd values) {
  return make_field<double>(std::move(labels), std::move(values));
}

template <typename Scalar>
struct BasicFibre {
  EntityId concept_id;
  Scalar threshold;
  std::vector<EntityId> members;  // ascending registry order

  [[nodiscard]] bool contains(const EntityId& e) const {
    return std::find(members.begin(), members.end(), e) != members.end();
  }
};

using Fibre = BasicFibre<double>;

namespace detail {

template <typename Scalar>
void check_unit_interval(Scalar v, Errc code, const char* what) {
  if (!(v >= Scalar(0) && v <= Scalar(1))) {
    throw Error(code, fmt::format("{} must lie in [0,1]", what));
  }
}

}  // namespace detail

// F_alpha(K) = {E : S(E, K) >= alpha}. Ties at alpha are members.
template <typename Scalar>
BasicFibre<Scalar> fibre(const BasicSimilarityField<Scalar>& field,
                         const EntityId& concept_id, Scalar alpha) {
  detail::check_unit_interval(alpha, Errc::AlphaOutOfRange, "alpha");
  field.entities().check(concept_id);
  BasicFibre<Scalar> out{concept_id, alpha, {}};
  const auto k = static_cast<Eigen::Index>(concept_id.index);
  for (std::size_t e = 0; e < field.size(); ++e) {
    if (field.values()(static_cast<Eigen::Index>(e), k) >= alpha) {
      out.members.push_back(field.entities().at(e));
    }
  }
  return out;
}

template <typename Scalar>
void check_same_registry(const BasicSimilarityField<Scalar>& a,
                         const BasicSimilarityField<Scalar>& b) {
  if (!(a.entities() == b.entities())) {
    throw Error(Errc::RegistryMismatch, "fields are over different registries");
  }
}

// Pointwise product; closed over similarity fields.
template <typename Scalar>
BasicSimilarityField<Scalar> combine_product(
    const BasicSimilarityField<Scalar>& f1,
    const BasicSimilarityField<Scalar>& f2) {
  check_same_registry(f1, f2);
  return {f1.entities(), f1.values().cwiseProduct(f2.values())};
}

// Convex combination sum_k w_k f_k. Weights must be non-negative and sum to
// one within 1e-12. The diagonal is set to exactly 1 and entries are clamped
// to [0,1] to absorb rounding in the weighted sum.
template <typename Scalar>
BasicSimilarityField<Scalar> combine_convex(
    std::span<const BasicSimilarityField<Scalar>> fields,
    std::span<const Scalar> weights) {
  if (fields.empty() || fields.size() != weights.size()) {
    throw Error(Errc::WeightsNotConvex,
                fmt::format("{} fields but {} weights", fields.size(),
                            weights.size()));
  }
  Scalar total = 0;
  for (Scalar w : weights) {
    if (!(w >= Scalar(0))) {
      throw Error(Errc::WeightsNotConvex, "weights must be non-negative");
    }
    total += w;
  }
  using std::abs;
  if (!(abs(total - Scalar(1)) <= Scalar(1e-12))) {
    throw Error(Errc::WeightsNotConvex, "weights must sum to 1");
  }
  for (const auto& f : fields) check_same_registry(fields.front(), f);

  using Matrix = typename BasicSimilarityField<Scalar>::Matrix;
  Matrix acc = Matrix::Zero(fields.front().values().rows(),
                            fields.front().values().cols());
  for (std::size_t k = 0; k < fields.size(); ++k) {
    acc += weights[k] * fields[k].values();
  }
  acc = acc.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
  acc.diagonal().setOnes();
  return {fields.front().entities(), std::move(acc)};
}

template <typename Scalar>
BasicSimilarityField<Scalar> combine_convex(
    const std::vector<BasicSimilarityField<Scalar>>& fields,
    const std::vector<Scalar>& weights) {
  return combine_convex(std::span<const BasicSimilarityField<Scalar>>(fields),
                        std::span<const Scalar>(weights));
}

// Mutual-membership test for x = S(E1,E2), y = S(E2,E1):
//   cond1: E1 in F_y(E2)  <=>  x >= y
//   cond2: E2 in F_x(E1)  <=>  y >= x
// Both can hold only when x == y.
template <typename Scalar>
struct BasicMembershipReport {
  Scalar x;
  Scalar y;
  bool cond1;
  bool cond2;

  [[nodiscard]] bool mutual() const noexcept { return cond1 && cond2; }
};

using MembershipReport = BasicMembershipReport<double>;

template <typename Scalar>
BasicMembershipReport<Scalar> incompatibility(Scalar x, Scalar y) {
  detail::check_unit_interval(x, Errc::OutOfRange, "x");
  detail::check_unit_interval(y, Errc::OutOfRange, "y");
  return {x, y, x >= y, y >= x};
}

// Reads x and y off a field for two entities.
template <typename Scalar>
BasicMembershipReport<Scalar> incompatibility(
    const BasicSimilarityField<Scalar>& field, const EntityId& e1,
    const EntityId& e2) {
  return incompatibility(field(e1, e2), field(e2, e1));
}

template <typename Scalar>
struct BasicIntelligenceScore {
  Scalar coverage;
  Scalar fidelity;
  Scalar threshold;
};

using IntelligenceScore = BasicIntelligenceScore<double>;

// Coverage is the fraction of generated entities inside F_alpha(K); fidelity
// is their mean S(E', K). Repeated ids count once.
template <typename Scalar>
BasicIntelligenceScore<Scalar> intelligence_metrics(
    const BasicSimilarityField<Scalar>& field, const EntityId& concept_id,
    Scalar alpha, std::span<const EntityId> generated) {
  detail::check_unit_interval(alpha, Errc::AlphaOutOfRange, "alpha");
  field.entities().check(concept_id);
  if (generated.empty()) {
    throw Error(Errc::EmptyGeneratedSet, "no generated entities");
  }
  std::vector<std::size_t> seen;
  seen.reserve(generated.size());
  for (const auto& e : generated) {
    field.entities().check(e);
    seen.push_back(e.index);
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());

  const auto k = static_cast<Eigen::Index>(concept_id.index);
  std::size_t inside = 0;
  Scalar sum = 0;
  for (std::size_t e : seen) {
    const Scalar s = field.values()(static_cast<Eigen::Index>(e), k);
    sum += s;
    if (s >= alpha) ++inside;
  }
  const auto m = static_cast<Scalar>(seen.size());
  return {static_cast<Scalar>(inside) / m, sum / m, alpha};
}

// Forward difference quotients of a fidelity sequence sampled at strictly
// increasing step indices: (f[p+1] - f[p]) / (step[p+1] - step[p]).
template <typename Scalar>
std::vector<Scalar> learning_rate(std::span<const Scalar> fidelity,
                                  std::span<const Scalar> steps) {
  if (fidelity.size() != steps.size()) {
    throw Error(Errc::LengthMismatch, "fidelity and steps differ in length");
  }
  std::vector<Scalar> out;
  for (std::size_t p = 1; p < fidelity.size(); ++p) {
    const Scalar dp = steps[p] - steps[p - 1];
    if (!(dp > Scalar(0))) {
      throw Error(Errc::InvalidArgument, "steps must be strictly increasing");
    }
    out.push_back((fidelity[p] - fidelity[p - 1]) / dp);
  }
  return out;
}

// Unit-step variant.
template <typename Scalar>
std::vector<Scalar> learning_rate(std::span<const Scalar> fidelity) {
  std::vector<Scalar> out;
  for (std::size_t p = 1; p < fidelity.size(); ++p) {
    out.push_back(fidelity[p] - fidelity[p - 1]);
  }
  return out;
}

// True when `e` sits in the source fibre and is the first entity other than
// the target concept itself to enter the target fibre.
template <typename Scalar>
bool is_recontextualization(const BasicSimilarityField<Scalar>& field,
                            const EntityId& e, const EntityId& source,
                            const EntityId& target, Scalar alpha, Scalar beta) {
  const auto src = fibre(field, source, alpha);
  const auto tgt = fibre(field, target, beta);
  if (!src.contains(e) || !tgt.contains(e)) return false;
  return std::all_of(tgt.members.begin(), tgt.members.end(),
                     [&](const EntityId& m) { return m == e || m == target; });
}

// Elementary functions used by the readout; specialize for scalar types the
// standard library does not cover (see sft/quad.hpp).
template <typename Scalar>
struct ScalarMath {
  static Scalar exp(Scalar x) { return std::exp(x); }
  static Scalar log(Scalar x) { return std::log(x); }
  static Scalar log1p(Scalar x) { return std::log1p(x); }
  static bool isfinite(Scalar x) { return std::isfinite(x); }
};

// Calibrated readout phi(r) = 1 / (1 + e^-r), a strictly increasing bijection
// R -> (0,1).
template <typename Scalar>
Scalar readout(Scalar r) {
  using M = ScalarMath<Scalar>;
  if (!M::isfinite(r)) {
    throw Error(Errc::InvalidArgument, "readout argument must be finite");
  }
  if (r >= Scalar(0)) return Scalar(1) / (Scalar(1) + M::exp(-r));
  const Scalar e = M::exp(r);
  return e / (Scalar(1) + e);
}

// phi^-1(s) = ln(s / (1 - s)).
template <typename Scalar>
Scalar readout_inverse(Scalar s) {
  using M = ScalarMath<Scalar>;
  if (!(s > Scalar(0) && s < Scalar(1))) {
    throw Error(Errc::InverseDomain, "readout inverse needs s in (0,1)");
  }
  return M::log(s) - M::log1p(-s);
}

}  // namespace sft

#endif  // SFT_FIELD_HPP_
