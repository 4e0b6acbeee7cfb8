// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/common/error.hpp"

namespace paralab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::PairCountMismatch: return "PairCountMismatch";
    case ErrorCode::InvalidSequence: return "InvalidSequence";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::SequenceTooLong: return "SequenceTooLong";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::NeedRawDump: return "NeedRawDump";
    case ErrorCode::TapMissing: return "TapMissing";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::MissingModel: return "MissingModel";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::InvalidSelection: return "InvalidSelection";
    case ErrorCode::NanScore: return "NanScore";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingAnnotation: return "MissingAnnotation";
    case ErrorCode::MalformedTree: return "MalformedTree";
    case ErrorCode::MissingLexiconEntry: return "MissingLexiconEntry";
    case ErrorCode::Oracle: return "Oracle";
    case ErrorCode::CutoffOutOfRange: return "CutoffOutOfRange";
    case ErrorCode::MalformedLexicon: return "MalformedLexicon";
    case ErrorCode::UnsupportedPattern: return "UnsupportedPattern";
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::InputChanged: return "InputChanged";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
  }
  return "Unknown";
}

}  // namespace paralab
