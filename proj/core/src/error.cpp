// Copyright 2026 The PDBMine Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdbmine/error.hpp"

namespace pdbmine {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kUnreadableFile: return "UnreadableFile";
    case ErrorCode::kEmptyStructure: return "EmptyStructure";
    case ErrorCode::kMalformedCoordinate: return "MalformedCoordinate";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kUndefinedAngle: return "UndefinedAngle";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kStoreAbsent: return "StoreAbsent";
    case ErrorCode::kStoreCorrupt: return "StoreCorrupt";
    case ErrorCode::kInvalidKmer: return "InvalidKmer";
    case ErrorCode::kStaleOccurrence: return "StaleOccurrence";
    case ErrorCode::kSequenceTooShort: return "SequenceTooShort";
    case ErrorCode::kInvalidSequence: return "InvalidSequence";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kEmptyObservations: return "EmptyObservations";
    case ErrorCode::kNoMatches: return "NoMatches";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace pdbmine
