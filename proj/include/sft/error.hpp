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

#ifndef SFT_ERROR_HPP_
#define SFT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sft {

enum class Errc {
  // field-core
  ShapeMismatch,
  DiagonalNotOne,
  OutOfRange,
  UnknownEntity,
  DuplicateEntity,
  AlphaOutOfRange,
  RegistryMismatch,
  WeightsNotConvex,
  EmptyGeneratedSet,
  InverseDomain,
  // dynamics
  TraceTooShort,
  MissingReadouts,
  // probes
  DuplicateBrand,
  EmptyCategory,
  TooFewBrands,
  NoVariants,
  BothNegInfinite,
  RaggedTemplates,
  IncompleteYesNo,
  // btl
  DisconnectedComparisonGraph,
  GammaNonPositive,
  LengthMismatch,
  // lockfilter
  MissingYMatrix,
  TauOutOfRange,
  NoLockedPairs,
  PoolTooSmall,
  // metrics-io
  UnknownCategory,
  SchemaViolation,
  DuplicateRecord,
  ParseError,
  IoError,
  InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

// All library failures are reported through this exception type; `code()`
// identifies the failure kind named in the module contracts.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::DiagonalNotOne: return "DiagonalNotOne";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::UnknownEntity: return "UnknownEntity";
    case Errc::DuplicateEntity: return "DuplicateEntity";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::RegistryMismatch: return "RegistryMismatch";
    case Errc::WeightsNotConvex: return "WeightsNotConvex";
    case Errc::EmptyGeneratedSet: return "EmptyGeneratedSet";
    case Errc::InverseDomain: return "InverseDomain";
    case Errc::TraceTooShort: return "TraceTooShort";
    case Errc::MissingReadouts: return "MissingReadouts";
    case Errc::DuplicateBrand: return "DuplicateBrand";
    case Errc::EmptyCategory: return "EmptyCategory";
    case Errc::TooFewBrands: return "TooFewBrands";
    case Errc::NoVariants: return "NoVariants";
    case Errc::BothNegInfinite: return "BothNegInfinite";
    case Errc::RaggedTemplates: return "RaggedTemplates";
    case Errc::IncompleteYesNo: return "IncompleteYesNo";
    case Errc::DisconnectedComparisonGraph: return "DisconnectedComparisonGraph";
    case Errc::GammaNonPositive: return "GammaNonPositive";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::MissingYMatrix: return "MissingYMatrix";
    case Errc::TauOutOfRange: return "TauOutOfRange";
    case Errc::NoLockedPairs: return "NoLockedPairs";
    case Errc::PoolTooSmall: return "PoolTooSmall";
    case Errc::UnknownCategory: return "UnknownCategory";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::DuplicateRecord: return "DuplicateRecord";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace sft

#endif  // SFT_ERROR_HPP_
