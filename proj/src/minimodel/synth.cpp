// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/minimodel/synth.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "paralab/common/error.hpp"
#include "paralab/common/rng.hpp"

namespace paralab::minimodel {

namespace {

constexpr int kNouns = 8, kVerbs = 8, kAdjectives = 6, kAdverbs = 4;

std::vector<std::string> build_vocabulary() {
  std::vector<std::string> v{"<pad>", "<bos>", "<eos>", "<unk>", "ACT", "PASS", "AUX", "BY",
                             "act",   "pass",  "aux",   "by"};
  for (bool upper : {true, false}) {
    auto add = [&](char prefix, int count) {
      for (int i = 0; i < count; ++i) {
        char c = upper ? prefix : static_cast<char>(prefix - 'A' + 'a');
        v.push_back(std::string(1, c) + std::to_string(i));
      }
    };
    add('N', kNouns);
    add('V', kVerbs);
    add('A', kAdjectives);
    add('R', kAdverbs);
  }
  return v;
}

const std::map<std::string, int, std::less<>>& index() {
  static const std::map<std::string, int, std::less<>> map = [] {
    std::map<std::string, int, std::less<>> m;
    const auto& v = toy_vocabulary();
    for (size_t i = 0; i < v.size(); ++i) m.emplace(v[i], static_cast<int>(i));
    return m;
  }();
  return map;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& toy_vocabulary() {
  static const std::vector<std::string> vocab = build_vocabulary();
  return vocab;
}

int toy_token_id(std::string_view word) {
  const auto& m = index();
  auto it = m.find(word);
  if (it == m.end()) fail(ErrorCode::InvalidSequence, "unknown toy word '" + std::string(word) + "'");
  return it->second;
}

std::string toy_detokenize(std::span<const int> ids) {
  const auto& v = toy_vocabulary();
  std::vector<std::string> words;
  for (int id : ids) {
    words.push_back(id >= 0 && id < static_cast<int>(v.size()) ? v[id] : "<unk>");
  }
  return join(words);
}

std::vector<int> toy_tokenize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<int> ids;
  std::string w;
  while (in >> w) ids.push_back(toy_token_id(w));
  return ids;
}

tensorio::TokenSequence toy_sequence(std::span<const int> ids) {
  tensorio::TokenSequence seq;
  const auto& v = toy_vocabulary();
  for (int id : ids) {
    seq.token_ids.push_back(id);
    seq.surface.push_back(v.at(static_cast<size_t>(id)));
    bool special = id < kNumSpecials;
    seq.last_subword_mask.push_back(!special);
    seq.specials_mask.push_back(special);
  }
  seq.token_ids.push_back(kEosId);
  seq.surface.push_back(v[kEosId]);
  seq.last_subword_mask.push_back(false);
  seq.specials_mask.push_back(true);
  return seq;
}

tensorio::ParallelCorpus synth_task(std::uint64_t seed, std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "synth_task needs n >= 1");
  Rng rng(seed, 0x5e17);
  tensorio::ParallelCorpus corpus;
  corpus.pair_kind = tensorio::PairKind::ActivePassive;
  corpus.references_source.emplace();
  corpus.references_target.emplace();
  auto pick = [&](char prefix, int count) {
    return std::string(1, prefix) + std::to_string(rng.uniform_index(static_cast<uint64_t>(count)));
  };
  auto noun_phrase = [&] {
    std::vector<std::string> np;
    if (rng.uniform_index(3) == 0) np.push_back(pick('A', kAdjectives));
    np.push_back(pick('N', kNouns));
    return np;
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> subj = noun_phrase();
    std::vector<std::string> obj = noun_phrase();
    while (obj.back() == subj.back()) obj.back() = pick('N', kNouns);
    std::string verb = pick('V', kVerbs);
    std::vector<std::string> tail;
    if (rng.uniform_index(4) == 0) tail.push_back(pick('R', kAdverbs));

    std::vector<std::string> active{"ACT"};
    active.insert(active.end(), subj.begin(), subj.end());
    active.push_back(verb);
    active.insert(active.end(), obj.begin(), obj.end());
    active.insert(active.end(), tail.begin(), tail.end());

    std::vector<std::string> passive{"PASS"};
    passive.insert(passive.end(), obj.begin(), obj.end());
    passive.push_back("AUX");
    passive.push_back(verb);
    passive.push_back("BY");
    passive.insert(passive.end(), subj.begin(), subj.end());
    passive.insert(passive.end(), tail.begin(), tail.end());

    auto to_ids = [](const std::vector<std::string>& words) {
      std::vector<int> ids;
      for (const auto& w : words) ids.push_back(toy_token_id(w));
      return ids;
    };
    auto translate = [](std::vector<std::string> words) {
      for (auto& w : words) w = lower(w);
      return join(words);
    };
    corpus.source.push_back(toy_sequence(to_ids(active)));
    corpus.paraphrase.push_back(toy_sequence(to_ids(passive)));
    corpus.references_source->push_back(translate(active));
    corpus.references_target->push_back(translate(passive));
  }
  return corpus;
}

std::vector<int> sequence_ids(const tensorio::TokenSequence& seq) {
  return std::vector<int>(seq.token_ids.begin(), seq.token_ids.end());
}

std::vector<TrainExample> training_examples(const tensorio::ParallelCorpus& corpus) {
  if (!corpus.references_source || !corpus.references_target) {
    fail(ErrorCode::InvalidArgument, "training needs reference translations");
  }
  std::vector<TrainExample> out;
  out.reserve(corpus.size() * 2);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out.push_back({sequence_ids(corpus.source[i]), toy_tokenize((*corpus.references_source)[i])});
    out.push_back(
        {sequence_ids(corpus.paraphrase[i]), toy_tokenize((*corpus.references_target)[i])});
  }
  return out;
}

}  // namespace paralab::minimodel
