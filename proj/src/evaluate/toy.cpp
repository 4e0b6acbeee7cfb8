// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/evaluate/toy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "paralab/common/error.hpp"
#include "paralab/correlate/experiment.hpp"
#include "paralab/correlate/map.hpp"
#include "paralab/minimodel/activations.hpp"
#include "paralab/minimodel/synth.hpp"
#include "paralab/minimodel/train.hpp"

namespace paralab::evaluate {

using manipulate::SelectionKind;
using tensorio::ParallelCorpus;

std::string_view universe_name(Universe u) {
  return u == Universe::AllBlocks ? "all-blocks" : "final-block";
}

Universe parse_universe(std::string_view name) {
  if (name == "all-blocks") return Universe::AllBlocks;
  if (name == "final-block") return Universe::FinalBlock;
  fail(ErrorCode::InvalidArgument, "unknown neuron universe: " + std::string(name));
}

ToyStudy toy_study(const minimodel::ModelParams& params, const ParallelCorpus& dev,
                   Universe universe, bool from_paraphrase, aggregate::Pooling pooling) {
  const auto& cfg = params.config;
  auto taps = minimodel::block_output_taps(cfg);
  ToyStudy study;
  study.universe = universe;
  if (universe == Universe::FinalBlock) {
    taps = {taps.back()};
    study.offset = static_cast<std::size_t>((cfg.n_encoder_blocks - 1) * cfg.embed_dim);
  }
  const auto ds = minimodel::dump_activations(params, dev.source, taps);
  const auto dp = minimodel::dump_activations(params, dev.paraphrase, taps);
  const auto s = aggregate::build_sample_matrix(ds, dev.source, 0, taps, pooling);
  const auto p = aggregate::build_sample_matrix(dp, dev.paraphrase, 0, taps, pooling);
  study.direction = from_paraphrase ? manipulate::direction_between(p, s)
                                    : manipulate::direction_between(s, p);
  for (const auto& c : correlate::paired_correlations(s.values, p.values, correlate::Method::Pearson)) {
    study.paracorr.push_back(c.degenerate ? 0.0 : c.value);
  }
  return study;
}

namespace {

struct Side {
  std::vector<std::vector<int>> inputs;
  std::vector<Tokens> own_refs;
  std::vector<Tokens> other_refs;
  std::string other_marker;
};

Side test_side(const ParallelCorpus& test, bool from_paraphrase) {
  if (!test.references_source || !test.references_target) {
    fail(ErrorCode::InvalidArgument, "test corpus needs references for both forms");
  }
  Side side;
  const auto& inputs = from_paraphrase ? test.paraphrase : test.source;
  const auto& own = from_paraphrase ? *test.references_target : *test.references_source;
  const auto& other = from_paraphrase ? *test.references_source : *test.references_target;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    side.inputs.push_back(minimodel::sequence_ids(inputs[i]));
    side.own_refs.push_back(split_words(own[i]));
    side.other_refs.push_back(split_words(other[i]));
  }
  side.other_marker = from_paraphrase ? "act" : "pass";
  return side;
}

std::vector<std::size_t> selected(const ToyStudy& study, SelectionKind kind, std::size_t k,
                                  std::uint64_t seed, std::size_t per_layer) {
  manipulate::NeuronSelection sel{kind, k, seed, {}};
  return manipulate::resolve_selection(sel, study.paracorr, study.paracorr.size(), per_layer);
}

void push_point(EvalReport& report, const std::string& name, const std::string& metric,
                std::uint64_t seed, double x, double y) {
  for (auto& s : report.series) {
    if (s.name == name) {
      s.x.push_back(x);
      s.y.push_back(y);
      return;
    }
  }
  report.series.push_back({name, metric, seed, {x}, {y}});
}

nlohmann::json study_metadata(const ToyStudy& study, const ParallelCorpus& test) {
  return {{"universe", universe_name(study.universe)},
          {"neurons", study.paracorr.size()},
          {"offset", study.offset},
          {"direction_norm", study.direction.norm},
          {"test_pairs", test.size()}};
}

}  // namespace

DecodeScores score_decodes(const minimodel::ModelParams& params, const ParallelCorpus& test,
                           bool from_paraphrase, const minimodel::EncoderHook& hook, int max_len) {
  const Side side = test_side(test, from_paraphrase);
  if (side.inputs.empty()) fail(ErrorCode::EmptyCorpus, "test corpus is empty");
  const auto decodes = minimodel::greedy_decode_batch(params, side.inputs, max_len, hook);
  std::vector<Tokens> outputs;
  std::size_t exact = 0, flipped = 0;
  for (std::size_t i = 0; i < decodes.size(); ++i) {
    outputs.push_back(split_words(minimodel::toy_detokenize(decodes[i].token_ids)));
    exact += outputs.back() == side.own_refs[i];
    flipped += !outputs.back().empty() && outputs.back().front() == side.other_marker;
  }
  const double n = static_cast<double>(outputs.size());
  return {bleu(outputs, side.own_refs), bleu(outputs, side.other_refs),
          static_cast<double>(flipped) / n, static_cast<double>(exact) / n};
}

EvalReport curve_experiment(const minimodel::ModelParams& params, const ToyStudy& study,
                            const ParallelCorpus& test, const CurveOptions& options) {
  const auto& cfg = params.config;
  const auto d = static_cast<std::size_t>(cfg.embed_dim);
  const double alpha = options.alpha.value_or(study.direction.norm);
  const std::string prefix(manipulate::selection_name(options.selection));
  EvalReport report;
  for (std::size_t k : options.ks) {
    DecodeScores sc;
    if (k == 0) {
      sc = score_decodes(params, test, options.from_paraphrase, {}, options.max_len);
    } else {
      auto ids = selected(study, options.selection, k, options.seed, d);
      const auto plan = manipulate::make_plan(study.direction, std::move(ids), alpha);
      sc = score_decodes(params, test, options.from_paraphrase,
                         manipulate::manipulation_hook(plan, cfg), options.max_len);
    }
    const double x = static_cast<double>(k);
    push_point(report, prefix + "/bleu-source-form", "bleu", options.seed, x, sc.bleu_source_form);
    push_point(report, prefix + "/bleu-target-form", "bleu", options.seed, x, sc.bleu_target_form);
    push_point(report, prefix + "/target-form-rate", "target_form_rate", options.seed, x,
               sc.target_form_rate);
    push_point(report, prefix + "/accuracy", "accuracy", options.seed, x, sc.accuracy);
  }
  report.metadata = study_metadata(study, test);
  report.metadata["experiment"] = "manipulation";
  report.metadata["selection"] = prefix;
  report.metadata["alpha"] = alpha;
  report.metadata["from"] = options.from_paraphrase ? "paraphrase" : "source";
  report.validate();
  return report;
}

EvalReport erasure_curve(const minimodel::ModelParams& params, const ToyStudy& study,
                         const ParallelCorpus& test, const ErasureOptions& options) {
  const auto& cfg = params.config;
  const auto d = static_cast<std::size_t>(cfg.embed_dim);
  const auto examples = minimodel::training_examples(test);
  EvalReport report;
  for (auto kind : options.selections) {
    const std::string name = std::string(manipulate::selection_name(kind)) + "/accuracy";
    for (std::size_t k : options.ks) {
      double acc = 0.0;
      if (k == 0) {
        acc = minimodel::sequence_accuracy(params, examples);
      } else {
        auto ids = selected(study, kind, k, options.seed, d);
        for (auto& id : ids) id += study.offset;
        acc = minimodel::sequence_accuracy(params, examples,
                                           manipulate::erasure_hook(std::move(ids), cfg));
      }
      push_point(report, name, "accuracy", options.seed, static_cast<double>(k), acc);
    }
  }
  report.metadata = study_metadata(study, test);
  report.metadata["experiment"] = "erasure";
  report.validate();
  return report;
}

namespace {

double median_abs(const std::vector<correlate::Correlation>& cs, std::size_t first,
                  std::size_t count) {
  std::vector<double> v;
  for (std::size_t i = first; i < first + count; ++i) v.push_back(std::abs(cs[i].value));
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

ConfoundMedians confound_medians(std::uint64_t seed, std::size_t sentences) {
  using correlate::ExperimentKind;
  minimodel::ModelConfig cfg;
  cfg.seed = seed;
  const auto params = minimodel::init_model(cfg);
  const auto corpus = minimodel::synth_task(1000 + seed, sentences);
  const auto d = static_cast<std::size_t>(cfg.embed_dim);

  correlate::ToyExperiment spec;
  spec.taps = {{0, tensorio::TapSite::PostAttention}};
  for (auto t : minimodel::block_output_taps(cfg)) spec.taps.push_back(t);
  spec.seed = seed;
  const std::size_t blocks = spec.taps.size() - 1;
  auto paired = [&](ExperimentKind kind) {
    spec.kind = kind;
    const auto s = correlate::toy_samples(spec, params, nullptr, corpus);
    return std::pair{s, correlate::paired_correlations(s.a.values, s.b.values,
                                                       correlate::Method::Pearson)};
  };

  ConfoundMedians out;
  const auto pos = paired(ExperimentKind::PosCorr).second;
  out.poscorr_attention0 = median_abs(pos, 0, d);
  out.poscorr_blocks = median_abs(pos, d, blocks * d);
  const auto random = paired(ExperimentKind::FullRandomControl).second;
  out.full_random_attention0 = median_abs(random, 0, d);
  out.full_random_blocks = median_abs(random, d, blocks * d);
  const auto [token_samples, token] = paired(ExperimentKind::TokenCorr);
  out.tokencorr_blocks = median_abs(token, d, blocks * d);
  const auto deranged = aggregate::select_rows(
      token_samples.b, correlate::random_derangement(token_samples.b.rows(), seed));
  out.random_pair_blocks = median_abs(
      correlate::paired_correlations(token_samples.a.values, deranged.values,
                                     correlate::Method::Pearson),
      d, blocks * d);
  return out;
}

}  // namespace paralab::evaluate
