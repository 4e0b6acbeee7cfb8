// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/minimodel/model.hpp"

#include <cmath>

#include "paralab/common/error.hpp"
#include "paralab/common/rng.hpp"

namespace paralab::minimodel {

using tensorio::TapId;
using tensorio::TapSite;

void ModelConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::BadConfig, what);
  };
  need(vocab_size > kNumSpecials, "vocab_size must exceed the special-token count");
  need(embed_dim >= 1 && n_encoder_blocks >= 1 && n_decoder_blocks >= 1 && n_heads >= 1 &&
           ffn_dim >= 1 && max_positions >= 1,
       "model sizes must be positive");
  need(embed_dim % 2 == 0, "embed_dim must be even");
  need(embed_dim % n_heads == 0, "embed_dim " + std::to_string(embed_dim) +
                                     " is not divisible by n_heads " + std::to_string(n_heads));
}

nlohmann::json ModelConfig::to_json() const {
  return {{"vocab_size", vocab_size},   {"embed_dim", embed_dim},
          {"n_encoder_blocks", n_encoder_blocks}, {"n_decoder_blocks", n_decoder_blocks},
          {"n_heads", n_heads},         {"ffn_dim", ffn_dim},
          {"max_positions", max_positions}, {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.vocab_size = j.value("vocab_size", c.vocab_size);
    c.embed_dim = j.value("embed_dim", c.embed_dim);
    c.n_encoder_blocks = j.value("n_encoder_blocks", c.n_encoder_blocks);
    c.n_decoder_blocks = j.value("n_decoder_blocks", c.n_decoder_blocks);
    c.n_heads = j.value("n_heads", c.n_heads);
    c.ffn_dim = j.value("ffn_dim", c.ffn_dim);
    c.max_positions = j.value("max_positions", c.max_positions);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BadConfig, std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

template <typename Out, typename P>
void collect(P& p, std::vector<Out>& out) {
  auto add = [&](std::string name, auto& m) { out.push_back(Out{std::move(name), &m}); };
  auto attention = [&](const std::string& pre, auto& a) {
    add(pre + "wq", a.wq); add(pre + "bq", a.bq);
    add(pre + "wk", a.wk); add(pre + "bk", a.bk);
    add(pre + "wv", a.wv); add(pre + "bv", a.bv);
    add(pre + "wo", a.wo); add(pre + "bo", a.bo);
  };
  auto norm = [&](const std::string& pre, auto& n) {
    add(pre + "gain", n.gain);
    add(pre + "bias", n.bias);
  };
  auto ffn = [&](const std::string& pre, auto& f) {
    add(pre + "w1", f.w1); add(pre + "b1", f.b1);
    add(pre + "w2", f.w2); add(pre + "b2", f.b2);
  };
  add("source_embedding", p.source_embedding);
  add("target_embedding", p.target_embedding);
  for (size_t b = 0; b < p.encoder.size(); ++b) {
    std::string pre = "encoder" + std::to_string(b) + ".";
    attention(pre + "attention.", p.encoder[b].attention);
    norm(pre + "norm1.", p.encoder[b].norm1);
    ffn(pre + "ffn.", p.encoder[b].ffn);
    norm(pre + "norm2.", p.encoder[b].norm2);
  }
  for (size_t b = 0; b < p.decoder.size(); ++b) {
    std::string pre = "decoder" + std::to_string(b) + ".";
    attention(pre + "self_attention.", p.decoder[b].self_attention);
    norm(pre + "norm1.", p.decoder[b].norm1);
    attention(pre + "cross_attention.", p.decoder[b].cross_attention);
    norm(pre + "norm2.", p.decoder[b].norm2);
    ffn(pre + "ffn.", p.decoder[b].ffn);
    norm(pre + "norm3.", p.decoder[b].norm3);
  }
  add("output_weight", p.output_weight);
  add("output_bias", p.output_bias);
}

AttentionParams zero_attention(int d) {
  return {Mat::Zero(d, d), Mat::Zero(1, d), Mat::Zero(d, d), Mat::Zero(1, d),
          Mat::Zero(d, d), Mat::Zero(1, d), Mat::Zero(d, d), Mat::Zero(1, d)};
}
NormParams zero_norm(int d) { return {Mat::Zero(1, d), Mat::Zero(1, d)}; }
FfnParams zero_ffn(int d, int f) {
  return {Mat::Zero(d, f), Mat::Zero(1, f), Mat::Zero(f, d), Mat::Zero(1, d)};
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_weight(const std::string& name) {
  const auto dot = name.rfind('.');
  const std::string leaf = dot == std::string::npos ? name : name.substr(dot + 1);
  return leaf[0] == 'w' || ends_with(leaf, "embedding") || leaf == "output_weight";
}

}  // namespace

std::vector<NamedTensor> ModelParams::tensors() {
  std::vector<NamedTensor> out;
  collect(*this, out);
  return out;
}

std::vector<ConstNamedTensor> ModelParams::tensors() const {
  std::vector<ConstNamedTensor> out;
  collect(*this, out);
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += static_cast<std::size_t>(t.tensor->size());
  return n;
}

bool ModelParams::operator==(const ModelParams& other) const {
  if (!(config == other.config)) return false;
  auto a = tensors();
  auto b = other.tensors();
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].tensor->rows() != b[i].tensor->rows() || a[i].tensor->cols() != b[i].tensor->cols() ||
        *a[i].tensor != *b[i].tensor) {
      return false;
    }
  }
  return true;
}

ModelParams zero_params(const ModelConfig& config) {
  config.validate();
  const int d = config.embed_dim, v = config.vocab_size;
  ModelParams p;
  p.config = config;
  p.source_embedding = Mat::Zero(v, d);
  p.target_embedding = Mat::Zero(v, d);
  for (int b = 0; b < config.n_encoder_blocks; ++b) {
    p.encoder.push_back({zero_attention(d), zero_norm(d), zero_ffn(d, config.ffn_dim), zero_norm(d)});
  }
  for (int b = 0; b < config.n_decoder_blocks; ++b) {
    p.decoder.push_back({zero_attention(d), zero_norm(d), zero_attention(d), zero_norm(d),
                         zero_ffn(d, config.ffn_dim), zero_norm(d)});
  }
  p.output_weight = Mat::Zero(d, v);
  p.output_bias = Mat::Zero(1, v);
  return p;
}

ModelParams init_model(const ModelConfig& config) {
  ModelParams p = zero_params(config);
  auto all = p.tensors();
  for (size_t t = 0; t < all.size(); ++t) {
    const std::string& name = all[t].name;
    Mat& m = *all[t].tensor;
    if (ends_with(name, "gain")) {
      m.setOnes();
    } else if (is_weight(name)) {
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = kInitStd * normal_at(config.seed, static_cast<std::uint32_t>(t),
                                           static_cast<std::uint64_t>(i));
      }
    }
  }
  return p;
}

double sinusoidal_pe(std::size_t position, std::size_t dim, std::size_t d) {
  const double i = static_cast<double>(dim / 2);
  const double angle =
      static_cast<double>(position) / std::pow(10000.0, 2.0 * i / static_cast<double>(d));
  return dim % 2 == 0 ? std::sin(angle) : std::cos(angle);
}

Mat positional_encoding(std::size_t n, std::size_t d) {
  Mat pe(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < d; ++k) {
      pe(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = sinusoidal_pe(p, k, d);
    }
  }
  return pe;
}

namespace {

ParamRef ref(const Mat& value, Mat* grad) { return ParamRef{&value, grad}; }

// Gradient pointers mirror the parameter structure; null when not training.
template <typename T>
Mat* g(T* grads, Mat T::*member) {
  return grads ? &(grads->*member) : nullptr;
}

Var attention_block(Tape& tape, const AttentionParams& a, AttentionParams* ga, Var query_in,
                    Var memory_in, const Segments& qs, const Segments& ks, int heads,
                    bool causal) {
  Var q = tape.linear(query_in, ref(a.wq, g(ga, &AttentionParams::wq)),
                      ref(a.bq, g(ga, &AttentionParams::bq)));
  Var k = tape.linear(memory_in, ref(a.wk, g(ga, &AttentionParams::wk)),
                      ref(a.bk, g(ga, &AttentionParams::bk)));
  Var v = tape.linear(memory_in, ref(a.wv, g(ga, &AttentionParams::wv)),
                      ref(a.bv, g(ga, &AttentionParams::bv)));
  Var heads_out = tape.attention(q, k, v, qs, ks, heads, causal);
  return tape.linear(heads_out, ref(a.wo, g(ga, &AttentionParams::wo)),
                     ref(a.bo, g(ga, &AttentionParams::bo)));
}

Var norm_block(Tape& tape, const NormParams& n, NormParams* gn, Var x) {
  return tape.layer_norm(x, ref(n.gain, g(gn, &NormParams::gain)),
                         ref(n.bias, g(gn, &NormParams::bias)));
}

Var ffn_block(Tape& tape, const FfnParams& f, FfnParams* gf, Var x) {
  Var hidden = tape.relu(tape.linear(x, ref(f.w1, g(gf, &FfnParams::w1)),
                                     ref(f.b1, g(gf, &FfnParams::b1))));
  return tape.linear(hidden, ref(f.w2, g(gf, &FfnParams::w2)), ref(f.b2, g(gf, &FfnParams::b2)));
}

Mat stacked_positions(const Segments& segs, int d) {
  int longest = 0;
  for (int s = 0; s < segs.count(); ++s) longest = std::max(longest, segs.length(s));
  Mat pe = positional_encoding(static_cast<std::size_t>(longest), static_cast<std::size_t>(d));
  Mat out(segs.total(), d);
  for (int s = 0; s < segs.count(); ++s) {
    out.middleRows(segs.begin(s), segs.length(s)) = pe.topRows(segs.length(s));
  }
  return out;
}

void apply_hook(Tape& tape, Var v, TapId tap, const Segments& segs, const EncoderHook& hook) {
  if (!hook) return;
  Mat& all = tape.mutable_value(v);
  for (int s = 0; s < segs.count(); ++s) {
    Mat rows = all.middleRows(segs.begin(s), segs.length(s));
    hook(tap, rows);
    if (rows.rows() != segs.length(s) || rows.cols() != all.cols()) {
      fail(ErrorCode::SizeMismatch, "hook changed the activation shape");
    }
    all.middleRows(segs.begin(s), segs.length(s)) = rows;
  }
}

void check_lengths(const ModelConfig& config, std::span<const std::vector<int>> seqs,
                   Segments& segs, std::vector<int>& flat) {
  for (const auto& s : seqs) {
    if (s.empty()) fail(ErrorCode::InvalidSequence, "empty token sequence");
    if (static_cast<int>(s.size()) > config.max_positions) {
      fail(ErrorCode::SequenceTooLong, "sequence of " + std::to_string(s.size()) +
                                           " tokens exceeds max_positions " +
                                           std::to_string(config.max_positions));
    }
    segs.push(static_cast<int>(s.size()));
    flat.insert(flat.end(), s.begin(), s.end());
  }
}

struct EncoderRun {
  Var output;
  std::vector<Var> taps;
};

EncoderRun run_encoder(Tape& tape, const ModelParams& p, ModelParams* gp, std::span<const int> ids,
                       const Segments& segs, bool add_positions, const EncoderHook& hook) {
  const int d = p.config.embed_dim;
  const double scale = std::sqrt(static_cast<double>(d));
  Var x = tape.embed(ref(p.source_embedding, gp ? &gp->source_embedding : nullptr), ids, scale);
  if (add_positions) x = tape.add_fixed(x, stacked_positions(segs, d));
  EncoderRun run;
  for (size_t b = 0; b < p.encoder.size(); ++b) {
    const auto& blk = p.encoder[b];
    EncoderBlockParams* gb = gp ? &gp->encoder[b] : nullptr;
    auto tap = [&](Var v, TapSite site) {
      apply_hook(tape, v, TapId{static_cast<std::uint32_t>(b), site}, segs, hook);
      run.taps.push_back(v);
    };
    Var attn = attention_block(tape, blk.attention, gb ? &gb->attention : nullptr, x, x, segs,
                               segs, p.config.n_heads, false);
    tap(attn, TapSite::PostAttention);
    Var h1 = norm_block(tape, blk.norm1, gb ? &gb->norm1 : nullptr, tape.add(x, attn));
    tap(h1, TapSite::PostResidualNorm1);
    Var f = ffn_block(tape, blk.ffn, gb ? &gb->ffn : nullptr, h1);
    tap(f, TapSite::PostFFN);
    x = norm_block(tape, blk.norm2, gb ? &gb->norm2 : nullptr, tape.add(h1, f));
    tap(x, TapSite::PostResidualNorm2);
  }
  run.output = x;
  return run;
}

Var run_decoder(Tape& tape, const ModelParams& p, ModelParams* gp, Var memory,
                const Segments& memory_segs, std::span<const int> ids, const Segments& segs) {
  const int d = p.config.embed_dim;
  const double scale = std::sqrt(static_cast<double>(d));
  Var y = tape.embed(ref(p.target_embedding, gp ? &gp->target_embedding : nullptr), ids, scale);
  y = tape.add_fixed(y, stacked_positions(segs, d));
  for (size_t b = 0; b < p.decoder.size(); ++b) {
    const auto& blk = p.decoder[b];
    DecoderBlockParams* gb = gp ? &gp->decoder[b] : nullptr;
    Var self = attention_block(tape, blk.self_attention, gb ? &gb->self_attention : nullptr, y, y,
                               segs, segs, p.config.n_heads, true);
    Var y1 = norm_block(tape, blk.norm1, gb ? &gb->norm1 : nullptr, tape.add(y, self));
    Var cross = attention_block(tape, blk.cross_attention, gb ? &gb->cross_attention : nullptr, y1,
                                memory, segs, memory_segs, p.config.n_heads, false);
    Var y2 = norm_block(tape, blk.norm2, gb ? &gb->norm2 : nullptr, tape.add(y1, cross));
    Var f = ffn_block(tape, blk.ffn, gb ? &gb->ffn : nullptr, y2);
    y = norm_block(tape, blk.norm3, gb ? &gb->norm3 : nullptr, tape.add(y2, f));
  }
  return tape.linear(y, ref(p.output_weight, gp ? &gp->output_weight : nullptr),
                     ref(p.output_bias, gp ? &gp->output_bias : nullptr));
}

}  // namespace

std::vector<EncodeOutput> forward_encode_batch(const ModelParams& params,
                                               std::span<const std::vector<int>> sentences,
                                               bool add_positions, const EncoderHook& hook) {
  if (sentences.empty()) return {};
  Segments segs;
  std::vector<int> flat;
  check_lengths(params.config, sentences, segs, flat);
  Tape tape(false);
  EncoderRun run = run_encoder(tape, params, nullptr, flat, segs, add_positions, hook);
  std::vector<EncodeOutput> out(sentences.size());
  for (int s = 0; s < segs.count(); ++s) {
    out[s].taps.reserve(run.taps.size());
    for (Var t : run.taps) {
      out[s].taps.push_back(tape.value(t).middleRows(segs.begin(s), segs.length(s)));
    }
  }
  return out;
}

EncodeOutput forward_encode(const ModelParams& params, const tensorio::TokenSequence& tokens,
                            bool add_positions, const EncoderHook& hook) {
  std::vector<std::vector<int>> one{std::vector<int>(tokens.token_ids.begin(), tokens.token_ids.end())};
  return std::move(forward_encode_batch(params, one, add_positions, hook).front());
}

double batch_loss(const ModelParams& params, std::span<const TrainExample> batch,
                  ModelParams* grads) {
  if (batch.empty()) fail(ErrorCode::EmptyInput, "empty training batch");
  Segments enc_segs, dec_segs;
  std::vector<int> enc_ids, dec_ids, targets;
  std::vector<std::vector<int>> sources;
  sources.reserve(batch.size());
  for (const auto& ex : batch) sources.push_back(ex.source);
  check_lengths(params.config, sources, enc_segs, enc_ids);
  for (const auto& ex : batch) {
    if (static_cast<int>(ex.target.size()) + 1 > params.config.max_positions) {
      fail(ErrorCode::SequenceTooLong, "target exceeds max_positions");
    }
    dec_segs.push(static_cast<int>(ex.target.size()) + 1);
    dec_ids.push_back(kBosId);
    dec_ids.insert(dec_ids.end(), ex.target.begin(), ex.target.end());
    targets.insert(targets.end(), ex.target.begin(), ex.target.end());
    targets.push_back(kEosId);
  }
  Tape tape(grads != nullptr);
  EncoderRun enc = run_encoder(tape, params, grads, enc_ids, enc_segs, true, {});
  Var logits = run_decoder(tape, params, grads, enc.output, enc_segs, dec_ids, dec_segs);
  Var loss = tape.cross_entropy(logits, targets);
  double value = tape.value(loss)(0, 0);
  if (grads) tape.backward(loss);
  return value;
}

std::vector<DecodeResult> greedy_decode_batch(const ModelParams& params,
                                              std::span<const std::vector<int>> sources,
                                              int max_len, const EncoderHook& hook) {
  if (max_len < 1 || max_len > params.config.max_positions) {
    fail(ErrorCode::InvalidArgument, "max_len must be in [1, max_positions]");
  }
  std::vector<DecodeResult> results(sources.size());
  if (sources.empty()) return results;
  Segments enc_segs;
  std::vector<int> enc_ids;
  check_lengths(params.config, sources, enc_segs, enc_ids);
  Tape enc_tape(false);
  EncoderRun enc = run_encoder(enc_tape, params, nullptr, enc_ids, enc_segs, true, hook);
  const Mat& memory_all = enc_tape.value(enc.output);

  std::vector<int> active(sources.size());
  for (size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);
  for (int step = 0; step < max_len && !active.empty(); ++step) {
    Segments mem_segs, dec_segs;
    Mat memory(0, memory_all.cols());
    std::vector<int> dec_ids;
    int mem_rows = 0;
    for (int i : active) mem_rows += enc_segs.length(i);
    memory.resize(mem_rows, memory_all.cols());
    int row = 0;
    for (int i : active) {
      memory.middleRows(row, enc_segs.length(i)) =
          memory_all.middleRows(enc_segs.begin(i), enc_segs.length(i));
      row += enc_segs.length(i);
      mem_segs.push(enc_segs.length(i));
      dec_ids.push_back(kBosId);
      dec_ids.insert(dec_ids.end(), results[i].token_ids.begin(), results[i].token_ids.end());
      dec_segs.push(step + 1);
    }
    Tape tape(false);
    Var mem = tape.constant(std::move(memory));
    Var logits = run_decoder(tape, params, nullptr, mem, mem_segs, dec_ids, dec_segs);
    const Mat& z = tape.value(logits);
    std::vector<int> still;
    for (size_t a = 0; a < active.size(); ++a) {
      const int i = active[a];
      Eigen::Index best = 0;
      z.row(dec_segs.begin(static_cast<int>(a)) + step).maxCoeff(&best);
      if (best == kEosId) continue;
      results[i].token_ids.push_back(static_cast<int>(best));
      still.push_back(i);
    }
    active = std::move(still);
  }
  for (int i : active) results[i].truncated = true;
  return results;
}

DecodeResult greedy_decode(const ModelParams& params, std::span<const int> source, int max_len,
                           const EncoderHook& hook) {
  std::vector<std::vector<int>> one{std::vector<int>(source.begin(), source.end())};
  return std::move(greedy_decode_batch(params, one, max_len, hook).front());
}

}  // namespace paralab::minimodel
