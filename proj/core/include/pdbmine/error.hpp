// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PDBMINE_ERROR_HPP_
#define PDBMINE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdbmine {

enum class ErrorCode {
  kUnreadableFile,
  kEmptyStructure,
  kMalformedCoordinate,
  kDegenerateGeometry,
  kUndefinedAngle,
  kLengthMismatch,
  kTooFewPoints,
  kStoreAbsent,
  kStoreCorrupt,
  kInvalidKmer,
  kStaleOccurrence,
  kSequenceTooShort,
  kInvalidSequence,
  kIoFailure,
  kEmptyObservations,
  kNoMatches,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pdbmine

#endif  // PDBMINE_ERROR_HPP_
