// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "commands.hpp"
#include "paralab/common/error.hpp"
#include "paralab/common/format.hpp"
#include "paralab/common/hash.hpp"
#include "paralab/correlate/experiment.hpp"
#include "paralab/correlate/map.hpp"
#include "paralab/evaluate/metrics.hpp"
#include "paralab/manipulate/manipulate.hpp"
#include "paralab/minimodel/activations.hpp"
#include "paralab/minimodel/checkpoint.hpp"
#include "paralab/tensorio/corpus.hpp"
#include "paralab/tensorio/dump.hpp"

namespace paralab::cli {

namespace {

using nlohmann::json;
using correlate::ExperimentKind;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

correlate::SamplePair samples_from_dump(const json& config, const correlate::ToyExperiment& spec,
                                        const tensorio::ParallelCorpus& corpus) {
  const auto base = spec.kind == ExperimentKind::RandomPairControl ? spec.base : spec.kind;
  if (base != ExperimentKind::ParaCorr) {
    fail(ErrorCode::InvalidArgument,
         std::string(correlate::kind_name(base)) + " from a dump is not supported; use --model");
  }
  const auto d = tensorio::read_dump(str(config, "dump"));
  const auto hash = tensorio::corpus_hash(str(config, "corpus"));
  if (!d.meta.corpus_hash.empty() && d.meta.corpus_hash != hash) {
    fail(ErrorCode::InvalidArgument, "the dump was produced from a different corpus");
  }
  if (d.n_sentences != 2 * corpus.size()) {
    fail(ErrorCode::SizeMismatch, "the dump must hold every source sentence then every paraphrase");
  }
  auto taps_spec = spec;
  taps_spec.taps = resolve_taps(config.at("taps"), d.taps);
  correlate::SamplePair out;
  out.a = aggregate::build_sample_matrix(d, corpus.source, 0, taps_spec.taps, spec.pooling,
                                         spec.token_mode);
  out.b = aggregate::build_sample_matrix(d, corpus.paraphrase, corpus.size(), taps_spec.taps,
                                         spec.pooling, spec.token_mode);
  return out;
}

void correlate_run(const json& config, RunContext& run) {
  correlate::ToyExperiment spec;
  spec.kind = correlate::parse_kind(str(config, "kind"));
  spec.base = correlate::parse_kind(str(config, "base"));
  spec.pooling = aggregate::parse_pooling(str(config, "pooling"));
  spec.token_mode = aggregate::parse_token_mode(str(config, "token-mode"));
  spec.seed = static_cast<std::uint64_t>(config.at("seed").get<long long>());
  const auto method = correlate::parse_method(str(config, "method"));
  const auto corpus = tensorio::read_corpus(str(config, "corpus"));
  if (is_set(config, "dump") == is_set(config, "model")) {
    fail(ErrorCode::Usage, "give exactly one of --dump and --model");
  }

  correlate::SamplePair samples;
  if (is_set(config, "dump")) {
    samples = samples_from_dump(config, spec, corpus);
  } else {
    const auto model = minimodel::load_checkpoint(str(config, "model"));
    std::optional<minimodel::ModelParams> second;
    if (is_set(config, "model-b")) second = minimodel::load_checkpoint(str(config, "model-b"));
    spec.taps = resolve_taps(config.at("taps"), minimodel::all_taps(model.config));
    samples = correlate::toy_samples(spec, model, second ? &*second : nullptr, corpus);
  }
  const auto map = correlate::run_experiment(spec.kind, samples.a, samples.b, method, spec.seed);

  correlate::write_map(map, run.file("map.cmap"));
  write_file(run.file("map.csv"), correlate::map_to_csv(map));
  const std::string title = is_set(config, "title") ? str(config, "title")
                                                    : std::string(correlate::kind_name(spec.kind));
  correlate::render_heatmap(map, run.file("map.svg"), title);

  const auto d = correlate::diag(map);
  const std::size_t per_tap = map.taps_a.empty() ? d.size() : d.size() / map.taps_a.size();
  std::string csv = "neuron,tap,unit,value,degenerate\n";
  std::vector<double> abs_diag;
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool deg = map.is_degenerate(i, i);
    degenerate += deg;
    abs_diag.push_back(std::abs(d[i]));
    csv += std::to_string(i) + "," + tensorio::tap_label(map.taps_a[i / per_tap]) + "," +
           std::to_string(i % per_tap) + "," + format_number(d[i]) + "," + (deg ? "1" : "0") +
           "\n";
  }
  write_file(run.file("diag.csv"), csv);
  const json summary = {{"kind", correlate::kind_name(spec.kind)},
                        {"method", correlate::method_name(method)},
                        {"neurons", d.size()},
                        {"median_abs_diag", median(abs_diag)},
                        {"degenerate", degenerate}};
  write_file(run.file("summary.json"), summary.dump(2) + "\n");
  run.log << correlate::kind_name(spec.kind) << ": " << d.size() << " neurons, median |diag| "
          << format_number(median(abs_diag)) << "\n";
}

std::vector<double> read_diag_values(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) fail(ErrorCode::EmptyInput, path.string() + " is empty");
  std::vector<std::string> header;
  {
    std::istringstream h(lines[0]);
    for (std::string f; std::getline(h, f, ',');) header.push_back(f);
  }
  const auto col = std::find(header.begin(), header.end(), "value") - header.begin();
  if (col == static_cast<long>(header.size())) {
    fail(ErrorCode::InvalidArgument, path.string() + " has no value column");
  }
  std::vector<double> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::istringstream row(lines[i]);
    std::string f;
    for (long c = 0; c <= col; ++c) std::getline(row, f, ',');
    try {
      values.push_back(std::stod(f));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(i + 1) +
                                           ": bad value '" + f + "'");
    }
  }
  return values;
}

std::vector<std::size_t> ranking(const json& config, const std::string& key) {
  auto v = read_diag_values(str(config, key));
  if (config.at("absolute").get<bool>()) {
    for (auto& x : v) x = std::abs(x);
  }
  return manipulate::rank_neurons(v, manipulate::Order::Desc);
}

void overlap_run(const json& config, RunContext& run) {
  const auto a = ranking(config, "a");
  const auto b = ranking(config, "b");
  const auto c = ranking(config, "c");
  if (a.size() != b.size() || a.size() != c.size()) {
    fail(ErrorCode::SizeMismatch, "rankings cover different neuron counts");
  }
  std::vector<std::size_t> xs;
  if (is_set(config, "x")) {
    xs = size_list(config, "x");
  } else {
    const std::size_t step = std::max<std::size_t>(1, a.size() / 16);
    for (std::size_t x = step; x <= a.size(); x += step) xs.push_back(x);
  }
  const auto points = evaluate::overlap_curve(a, b, c, xs);
  std::string csv = "x,a_vs_bc,a_vs_b,a_vs_c,b_vs_c\n";
  evaluate::EvalReport report;
  report.series = {{"a-vs-b-or-c", "overlap", 0, {}, {}},
                   {"a-vs-b", "overlap", 0, {}, {}},
                   {"a-vs-c", "overlap", 0, {}, {}},
                   {"b-vs-c", "overlap", 0, {}, {}}};
  for (const auto& p : points) {
    csv += std::to_string(p.x) + "," + format_number(p.a_vs_bc) + "," + format_number(p.a_vs_b) +
           "," + format_number(p.a_vs_c) + "," + format_number(p.b_vs_c) + "\n";
    const double ys[] = {p.a_vs_bc, p.a_vs_b, p.a_vs_c, p.b_vs_c};
    for (std::size_t s = 0; s < 4; ++s) {
      report.series[s].x.push_back(static_cast<double>(p.x));
      report.series[s].y.push_back(ys[s]);
    }
  }
  write_file(run.file("overlap.csv"), csv);
  evaluate::render_curves(report, run.file("overlap.svg"), "ranking overlap", "top x neurons",
                          "overlap (%)");
}

void plot_run(const json& config, RunContext& run) {
  if (is_set(config, "report") == is_set(config, "map")) {
    fail(ErrorCode::Usage, "give exactly one of --report and --map");
  }
  const auto title = str(config, "title");
  if (is_set(config, "report")) {
    const auto report =
        evaluate::EvalReport::from_json(json::parse(read_file(str(config, "report"))));
    evaluate::render_curves(report, run.file("plot.svg"), title, str(config, "x-label"),
                            str(config, "y-label"));
  } else {
    correlate::render_heatmap(correlate::read_map(str(config, "map")), run.file("plot.svg"),
                              title);
  }
}

}  // namespace

CommandDef correlate_command() {
  return {"correlate",
          "build a neuron correlation map",
          {string_option("kind", "paracorr",
                         "paracorr, modelcorr, poscorr, tokencorr, random-pair or full-random"),
           string_option("base", "paracorr", "paired experiment behind random-pair"),
           path_option("corpus", "parallel corpus"),
           path_option("dump", "activation dump of source then paraphrase sentences", false),
           path_option("model", "toy model checkpoint", false),
           path_option("model-b", "second toy model for modelcorr", false),
           string_option("method", "pearson", "pearson or spearman"),
           string_option("pooling", "mean", "mean, min or max"),
           string_option("token-mode", "last-subword", "last-subword or all-subwords"),
           OptionDef{"taps", OptionType::StringList, json::array({"block-outputs"}),
                     "block-outputs, all or tap labels"},
           int_option("seed", 1, "seed for random tokens and pairings"),
           OptionDef{"title", OptionType::String, nullptr, "heatmap title"}},
          correlate_run};
}

CommandDef overlap_command() {
  return {"overlap",
          "overlap between the top neurons of three rankings",
          {path_option("a", "diag.csv of the reference ranking"),
           path_option("b", "diag.csv of the second ranking"),
           path_option("c", "diag.csv of the third ranking"),
           OptionDef{"x", OptionType::IntList, nullptr, "prefix sizes"},
           flag_option("absolute", "rank by absolute value")},
          overlap_run};
}

CommandDef plot_command() {
  return {"plot",
          "render a report or a correlation map as SVG",
          {path_option("report", "report.json", false), path_option("map", "map.cmap", false),
           string_option("title", "", "plot title"), string_option("x-label", "k", "x axis label"),
           string_option("y-label", "value", "y axis label")},
          plot_run};
}

}  // namespace paralab::cli
