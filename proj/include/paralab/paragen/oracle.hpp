// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace paralab::paragen {

/// Scores insertion choices and whole sentences. `tokens` never contains
/// the mask; `position` is the insertion index in [0, tokens.size()].
class Oracle {
 public:
  virtual ~Oracle() = default;
  /// Returns one of `candidates`.
  virtual std::string mask_fill_best(std::span<const std::string> tokens, std::size_t position,
                                     std::span<const std::string> candidates) = 0;
  virtual double sentence_logprob(std::span<const std::string> tokens) = 0;
};

/// Deterministic stand-in for a language model.
///
/// mask_fill_best returns the candidate that comes first in `priority`;
/// when none of the candidates is listed, the first candidate.
///
/// sentence_logprob is minus the token count, minus `penalty` for every
/// determiner or possessive that directly follows a word ending in a
/// nominalizing suffix (so "enjoyment the warmth" scores below
/// "enjoyment of the warmth"). With `penalty` = 0 it is the plain negative
/// length.
class FallbackOracle : public Oracle {
 public:
  struct Options {
    std::vector<std::string> priority = {"of", "upon", "during", "to"};
    double penalty = 2.0;
  };

  FallbackOracle() = default;
  explicit FallbackOracle(Options options) : options_(std::move(options)) {}

  std::string mask_fill_best(std::span<const std::string> tokens, std::size_t position,
                             std::span<const std::string> candidates) override;
  double sentence_logprob(std::span<const std::string> tokens) override;

  const Options& options() const { return options_; }

 private:
  Options options_;
};

/// Server side of the line protocol. Requests:
///   {"op":"mask_fill","tokens":[...],"pos":i,"cands":[...]} -> {"choice":"..."}
///   {"op":"logprob","tokens":[...]}                         -> {"lp":-41.3}
/// Malformed requests get {"error":"..."}; this never throws.
nlohmann::json handle_request(Oracle& oracle, const nlohmann::json& request);
std::string handle_line(Oracle& oracle, std::string_view line);
/// Answers one request per input line until end of input.
void serve(Oracle& oracle, std::istream& in, std::ostream& out);

/// Client of a line-protocol oracle. Endpoints:
///   exec:<shell command>  spawn a process and talk over its stdin/stdout
///   unix:<path>           connect to a unix-domain socket
///   tcp:<host>:<port>     connect over TCP
/// Any transport failure, error object or out-of-set choice raises
/// Error(Oracle).
class ProtocolOracle : public Oracle {
 public:
  explicit ProtocolOracle(std::string_view endpoint);
  ~ProtocolOracle() override;
  ProtocolOracle(const ProtocolOracle&) = delete;
  ProtocolOracle& operator=(const ProtocolOracle&) = delete;

  std::string mask_fill_best(std::span<const std::string> tokens, std::size_t position,
                             std::span<const std::string> candidates) override;
  double sentence_logprob(std::span<const std::string> tokens) override;

 private:
  nlohmann::json call(const nlohmann::json& request);
  std::string read_line();

  int read_fd_ = -1;
  int write_fd_ = -1;
  int child_ = -1;
  std::string buffer_;
};

/// "fallback", "fallback:length" (penalty 0) or a ProtocolOracle endpoint.
std::unique_ptr<Oracle> make_oracle(std::string_view spec);

}  // namespace paralab::paragen
