// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paralab/minimodel/model.hpp"
#include "paralab/tensorio/corpus.hpp"

namespace paralab::minimodel {

/// The 64-symbol toy language. Ids 0-3 are <pad> <bos> <eos> <unk>, then
/// the source markers ACT PASS AUX BY and their target twins, then content
/// words: nouns N0-N7, verbs V0-V7, adjectives A0-A5 and adverbs R0-R3 on
/// the source side, lower-cased on the target side.
///
///   active     ACT [A] Ns V [A] No [R]          -> act [a] ns v [a] no [r]
///   paraphrase PASS [A] No AUX V BY [A] Ns [R]  -> pass [a] no aux v by [a] ns [r]
///
/// The paraphrase is always exactly two tokens longer than its source.
const std::vector<std::string>& toy_vocabulary();
/// Throws Error(InvalidSequence) on unknown words.
int toy_token_id(std::string_view word);
std::string toy_detokenize(std::span<const int> ids);
std::vector<int> toy_tokenize(std::string_view text);

/// Encoder input for `ids`: surface words from the vocabulary plus a
/// trailing EOS, each word a single sub-word piece.
tensorio::TokenSequence toy_sequence(std::span<const int> ids);

tensorio::ParallelCorpus synth_task(std::uint64_t seed, std::size_t n);

std::vector<int> sequence_ids(const tensorio::TokenSequence& seq);

/// Both sides of every pair, each mapped to its reference translation.
std::vector<TrainExample> training_examples(const tensorio::ParallelCorpus& corpus);

}  // namespace paralab::minimodel
