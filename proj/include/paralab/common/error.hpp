// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace paralab {

enum class ErrorCode {
  InvalidArgument,
  Io,
  MalformedJson,
  EmptyCorpus,
  PairCountMismatch,
  InvalidSequence,
  BadMagic,
  UnsupportedVersion,
  SizeMismatch,
  NonFiniteValue,
  BadConfig,
  SequenceTooLong,
  Divergence,
  EmptySelection,
  NeedRawDump,
  TapMissing,
  LengthMismatch,
  TooFewSamples,
  MissingModel,
  NonSquare,
  ZeroNorm,
  InvalidSelection,
  NanScore,
  EmptyInput,
  MissingAnnotation,
  MalformedTree,
  MissingLexiconEntry,
  Oracle,
  CutoffOutOfRange,
  MalformedLexicon,
  UnsupportedPattern,
  Usage,
  InputChanged,
  ReplayMismatch,
};

std::string_view to_string(ErrorCode code);

/// Error carrying a stable machine-readable code; the CLI prints the code
/// verbatim so scripts can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace paralab
