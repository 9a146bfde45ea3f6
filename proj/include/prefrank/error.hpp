// Copyright 2026 The prefrank Authors.
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

#ifndef PREFRANK_ERROR_HPP_
#define PREFRANK_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace prefrank {

enum class Errc {
  kMalformedLine,
  kDuplicateSameModels,
  kEmptyInput,
  kMissingField,
  kUnknownWinnerLabel,
  kNoQualifyingUsers,
  kUnknownUser,
  kNonFiniteRating,
  kDegenerate,
  kNotConverged,
  kTooFewModels,
  kLengthMismatch,
  kTooFewItems,
  kZeroVariance,
  kAllZeroDifferences,
  kMixedSystems,
  kEmptyCorpus,
  kEmptyDocument,
  kNoQueries,
  kTooFewPoints,
  kDegenerateGeometry,
  kTooFewUsers,
  kNonFiniteLoss,
  kEmptyEnsemble,
  kEmptyValidation,
  kTooManyModels,
  kInvalidShape,
  kIncompleteBundle,
  kInvalidArgument,
  kIo,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kMalformedLine: return "MalformedLine";
    case Errc::kDuplicateSameModels: return "DuplicateSameModels";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kMissingField: return "MissingField";
    case Errc::kUnknownWinnerLabel: return "UnknownWinnerLabel";
    case Errc::kNoQualifyingUsers: return "NoQualifyingUsers";
    case Errc::kUnknownUser: return "UnknownUser";
    case Errc::kNonFiniteRating: return "NonFiniteRating";
    case Errc::kDegenerate: return "Degenerate";
    case Errc::kNotConverged: return "NotConverged";
    case Errc::kTooFewModels: return "TooFewModels";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kTooFewItems: return "TooFewItems";
    case Errc::kZeroVariance: return "ZeroVariance";
    case Errc::kAllZeroDifferences: return "AllZeroDifferences";
    case Errc::kMixedSystems: return "MixedSystems";
    case Errc::kEmptyCorpus: return "EmptyCorpus";
    case Errc::kEmptyDocument: return "EmptyDocument";
    case Errc::kNoQueries: return "NoQueries";
    case Errc::kTooFewPoints: return "TooFewPoints";
    case Errc::kDegenerateGeometry: return "DegenerateGeometry";
    case Errc::kTooFewUsers: return "TooFewUsers";
    case Errc::kNonFiniteLoss: return "NonFiniteLoss";
    case Errc::kEmptyEnsemble: return "EmptyEnsemble";
    case Errc::kEmptyValidation: return "EmptyValidation";
    case Errc::kTooManyModels: return "TooManyModels";
    case Errc::kInvalidShape: return "InvalidShape";
    case Errc::kIncompleteBundle: return "IncompleteBundle";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

// All library failures are reported through this type. `detail()` holds the
// offending field, model or label when the error names one; `line()` is the
// 1-based input line for parse errors and 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string detail, std::size_t line = 0)
      : std::runtime_error(format(code, detail, line)),
        code_(code),
        detail_(std::move(detail)),
        line_(line) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(Errc code, const std::string& detail,
                            std::size_t line) {
    std::string out(errc_name(code));
    if (line != 0) out += " (line " + std::to_string(line) + ")";
    if (!detail.empty()) out += ": " + detail;
    return out;
  }

  Errc code_;
  std::string detail_;
  std::size_t line_;
};

}  // namespace prefrank

#endif  // PREFRANK_ERROR_HPP_
