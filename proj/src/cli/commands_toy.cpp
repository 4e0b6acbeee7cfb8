// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include <limits>
#include <ostream>

#include "commands.hpp"
#include "paralab/common/error.hpp"
#include "paralab/common/format.hpp"
#include "paralab/common/hash.hpp"
#include "paralab/evaluate/toy.hpp"
#include "paralab/minimodel/activations.hpp"
#include "paralab/minimodel/checkpoint.hpp"
#include "paralab/minimodel/synth.hpp"
#include "paralab/minimodel/train.hpp"
#include "paralab/tensorio/corpus.hpp"
#include "paralab/tensorio/dump.hpp"

namespace paralab::cli {

namespace {

using nlohmann::json;
using minimodel::ModelParams;

int get_int(const json& config, const std::string& key) {
  const auto v = config.at(key).get<long long>();
  if (v < 0 || v > std::numeric_limits<int>::max()) {
    fail(ErrorCode::InvalidArgument, "--" + key + " is out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t get_seed(const json& config, const std::string& key) {
  const auto v = config.at(key).get<long long>();
  if (v < 0) fail(ErrorCode::InvalidArgument, "--" + key + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

void train_toy(const json& config, RunContext& run) {
  minimodel::ModelConfig model;
  model.vocab_size = static_cast<int>(minimodel::toy_vocabulary().size());
  model.embed_dim = get_int(config, "embed-dim");
  model.n_encoder_blocks = get_int(config, "encoder-blocks");
  model.n_decoder_blocks = get_int(config, "decoder-blocks");
  model.n_heads = get_int(config, "heads");
  model.ffn_dim = get_int(config, "ffn-dim");
  model.seed = get_seed(config, "seed");
  model.validate();

  minimodel::TrainOptions options;
  options.steps = get_int(config, "steps");
  options.batch_size = get_int(config, "batch-size");
  options.learning_rate = config.at("learning-rate").get<double>();
  options.warmup_steps = get_int(config, "warmup-steps");
  options.seed = get_seed(config, "train-seed");

  const auto train_set = minimodel::synth_task(get_seed(config, "data-seed"),
                                               static_cast<std::size_t>(get_int(config, "train-size")));
  const auto dev = minimodel::synth_task(get_seed(config, "dev-seed"),
                                         static_cast<std::size_t>(get_int(config, "dev-size")));
  const auto test = minimodel::synth_task(get_seed(config, "test-seed"),
                                          static_cast<std::size_t>(get_int(config, "test-size")));
  const auto examples = minimodel::training_examples(train_set);
  const int every = std::max(1, options.steps / 10);
  auto result = minimodel::train(minimodel::init_model(model), examples, options,
                                 [&](int step, double loss) {
                                   if ((step + 1) % every == 0) {
                                     run.log << "step " << step + 1 << " loss "
                                             << format_number(loss) << "\n";
                                   }
                                 });

  minimodel::save_checkpoint(result.params, run.file("model.ckpt"));
  tensorio::write_corpus(train_set, run.file("train.jsonl"));
  tensorio::write_corpus(dev, run.file("dev.jsonl"));
  tensorio::write_corpus(test, run.file("test.jsonl"));
  std::string loss = "step,loss\n";
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
    loss += std::to_string(i + 1) + "," + format_number(result.loss_trace[i]) + "\n";
  }
  write_file(run.file("loss.csv"), loss);
  const double dev_acc = minimodel::sequence_accuracy(result.params, minimodel::training_examples(dev));
  const double test_acc =
      minimodel::sequence_accuracy(result.params, minimodel::training_examples(test));
  write_file(run.file("accuracy.csv"), "split,accuracy\ndev," + format_number(dev_acc) +
                                           "\ntest," + format_number(test_acc) + "\n");
  run.log << "dev accuracy " << format_number(dev_acc) << ", test accuracy "
          << format_number(test_acc) << "\n";
}

void dump(const json& config, RunContext& run) {
  const auto params = minimodel::load_checkpoint(str(config, "model"));
  const auto corpus_path = str(config, "corpus");
  const auto corpus = tensorio::read_corpus(corpus_path);
  const auto side = str(config, "side");
  std::vector<tensorio::TokenSequence> sentences;
  if (side == "source" || side == "both") {
    sentences.insert(sentences.end(), corpus.source.begin(), corpus.source.end());
  }
  if (side == "paraphrase" || side == "both") {
    sentences.insert(sentences.end(), corpus.paraphrase.begin(), corpus.paraphrase.end());
  }
  if (sentences.empty()) fail(ErrorCode::InvalidArgument, "--side must be source, paraphrase or both");
  const auto available = minimodel::all_taps(params.config);
  const auto taps = resolve_taps(config.at("taps"), available);
  const bool positions = !config.at("no-positions").get<bool>();
  auto d = minimodel::dump_activations(params, sentences, taps, positions);
  d.meta.model_id = "toy:" + git_blob_hash_file(str(config, "model"));
  d.meta.seed = params.config.seed;
  d.meta.pooling = "none";
  d.meta.corpus_hash = tensorio::corpus_hash(corpus_path);
  d.meta.extra = {{"side", side}, {"pairs", corpus.size()}, {"positions", positions}};
  tensorio::write_dump(d, run.file("activations.actd"));
  run.log << "dumped " << d.n_sentences << " sentences x " << d.n_taps << " taps x "
          << d.n_neurons << " neurons\n";
}

struct StudyInputs {
  ModelParams params;
  tensorio::ParallelCorpus test;
  evaluate::ToyStudy study;
};

StudyInputs load_study(const json& config, bool from_paraphrase) {
  StudyInputs in;
  in.params = minimodel::load_checkpoint(str(config, "model"));
  const auto dev = tensorio::read_corpus(str(config, "dev"));
  in.test = tensorio::read_corpus(str(config, "test"));
  in.study = evaluate::toy_study(in.params, dev, evaluate::parse_universe(str(config, "universe")),
                                 from_paraphrase, aggregate::parse_pooling(str(config, "pooling")));
  return in;
}

std::vector<std::size_t> ks_for(const json& config, std::size_t n) {
  return is_set(config, "k") ? size_list(config, "k") : quartile_ks(n);
}

void manipulate_run(const json& config, RunContext& run) {
  const auto from = str(config, "from");
  if (from != "source" && from != "paraphrase") {
    fail(ErrorCode::InvalidArgument, "--from must be source or paraphrase");
  }
  const auto in = load_study(config, from == "paraphrase");
  evaluate::CurveOptions options;
  options.selection = manipulate::parse_selection(str(config, "select"));
  options.ks = ks_for(config, in.study.paracorr.size());
  if (is_set(config, "alpha")) options.alpha = config.at("alpha").get<double>();
  options.seed = get_seed(config, "seed");
  options.from_paraphrase = from == "paraphrase";
  options.max_len = get_int(config, "max-len");
  auto report = evaluate::curve_experiment(in.params, in.study, in.test, options);

  const int repeats = get_int(config, "random-directions");
  if (repeats > 0) {
    auto random_options = options;
    random_options.alpha = options.alpha.value_or(in.study.direction.norm);
    std::vector<evaluate::Series> mean;
    for (int r = 0; r < repeats; ++r) {
      auto study = in.study;
      study.direction = manipulate::random_direction(in.study.direction.mean_c1,
                                                     get_seed(config, "direction-seed") +
                                                         static_cast<std::uint64_t>(r));
      const auto rep = evaluate::curve_experiment(in.params, study, in.test, random_options);
      if (mean.empty()) {
        mean = rep.series;
        continue;
      }
      for (std::size_t s = 0; s < mean.size(); ++s) {
        for (std::size_t i = 0; i < mean[s].y.size(); ++i) mean[s].y[i] += rep.series[s].y[i];
      }
    }
    for (auto& s : mean) {
      for (auto& y : s.y) y /= repeats;
      s.name = "random-direction" + s.name.substr(s.name.find('/'));
      s.seed = get_seed(config, "direction-seed");
      report.series.push_back(std::move(s));
    }
    report.metadata["random_directions"] = repeats;
  }
  write_report(report, run, "manipulation", "k", "value");
  if (const auto* rate = report.find(std::string(manipulate::selection_name(options.selection)) +
                                     "/target-form-rate")) {
    run.log << "target-form rate at k=" << format_number(rate->x.back()) << ": "
            << format_number(rate->y.back()) << "\n";
  }
}

void erase_run(const json& config, RunContext& run) {
  const auto in = load_study(config, true);
  evaluate::ErasureOptions options;
  options.selections.clear();
  for (const auto& s : config.at("select")) {
    options.selections.push_back(manipulate::parse_selection(s.get<std::string>()));
  }
  options.ks = ks_for(config, in.study.paracorr.size());
  options.seed = get_seed(config, "seed");
  options.max_len = get_int(config, "max-len");
  const auto report = evaluate::erasure_curve(in.params, in.study, in.test, options);
  write_report(report, run, "erasure", "k", "accuracy");
}

std::vector<OptionDef> study_options() {
  return {path_option("model", "toy model checkpoint"),
          path_option("dev", "corpus for directions and neuron scores"),
          path_option("test", "corpus to decode"),
          string_option("universe", "final-block", "final-block or all-blocks"),
          string_option("pooling", "mean", "mean, min or max"),
          int_option("seed", 1, "seed for random neuron selections"),
          int_option("max-len", 32, "decode length limit"),
          OptionDef{"k", OptionType::IntList, nullptr, "neuron counts (default: quartiles)"}};
}

}  // namespace

CommandDef train_toy_command() {
  return {"train-toy",
          "train the toy active/passive translation model",
          {int_option("seed", 1, "model initialisation seed"),
           int_option("train-seed", 1, "batch sampling seed"),
           int_option("data-seed", 1, "training corpus seed"),
           int_option("train-size", 5000, "training pairs"),
           int_option("dev-seed", 500, "dev corpus seed"), int_option("dev-size", 300, "dev pairs"),
           int_option("test-seed", 600, "test corpus seed"),
           int_option("test-size", 200, "test pairs"), int_option("steps", 2000, "training steps"),
           int_option("batch-size", 32, "examples per step"),
           OptionDef{"learning-rate", OptionType::Double, 3e-3, "peak learning rate"},
           int_option("warmup-steps", 200, "linear warmup steps"),
           int_option("embed-dim", 32, "model width"),
           int_option("encoder-blocks", 4, "encoder blocks"),
           int_option("decoder-blocks", 2, "decoder blocks"),
           int_option("heads", 2, "attention heads"), int_option("ffn-dim", 64, "feed-forward width")},
          train_toy};
}

CommandDef dump_activations_command() {
  return {"dump-activations",
          "encode a corpus with the toy model and write an activation dump",
          {path_option("model", "toy model checkpoint"), path_option("corpus", "parallel corpus"),
           string_option("side", "both", "source, paraphrase or both (source rows first)"),
           OptionDef{"taps", OptionType::StringList, json::array({"block-outputs"}),
                     "block-outputs, all or tap labels"},
           flag_option("no-positions", "encode without positional encodings")},
          dump};
}

CommandDef manipulate_command() {
  auto options = study_options();
  options.push_back(string_option("select", "top-paracorr",
                                  "top-paracorr, bottom-paracorr, random or layer-random"));
  options.push_back(OptionDef{"alpha", OptionType::Double, nullptr,
                              "shift magnitude (default: the direction norm)"});
  options.push_back(string_option("from", "paraphrase", "manipulate paraphrase or source inputs"));
  options.push_back(int_option("random-directions", 0, "random-direction baselines to average"));
  options.push_back(int_option("direction-seed", 1, "first random-direction seed"));
  return {"manipulate", "shift selected neurons along the paraphrase direction and decode",
          std::move(options), manipulate_run};
}

CommandDef erase_command() {
  auto options = study_options();
  options.push_back(OptionDef{"select", OptionType::StringList,
                              json::array({"top-paracorr", "bottom-paracorr"}),
                              "selections to compare"});
  return {"erase", "zero selected neurons and measure decoding accuracy", std::move(options),
          erase_run};
}

}  // namespace paralab::cli
