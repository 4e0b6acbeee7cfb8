// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "paralab/cli/cli.hpp"
#include "paralab/common/hash.hpp"
#include "paralab/common/rng.hpp"
#include "paralab/correlate/experiment.hpp"
#include "paralab/correlate/stats.hpp"
#include "paralab/evaluate/metrics.hpp"
#include "paralab/evaluate/toy.hpp"
#include "paralab/manipulate/manipulate.hpp"
#include "paralab/minimodel/activations.hpp"
#include "paralab/minimodel/synth.hpp"
#include "paralab/minimodel/train.hpp"
#include "paralab/paragen/engine.hpp"

namespace fs = std::filesystem;
using namespace paralab;
using nlohmann::json;

namespace {

// Pinned from `calibrate_bands 20` (seeds 1-20); checked on seeds 101-105.
constexpr double kPosCorrMargin = 0.022;  // half the smallest calibration excess (0.0447)
constexpr double kAttention0BandLo = 0.035819;
constexpr double kAttention0BandHi = 0.083001;
constexpr double kRandomPairBandHi = 0.061110;
constexpr std::uint64_t kHeldOutSeeds[] = {101, 102, 103, 104, 105};

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += "; over the " + std::to_string(static_cast<int>(limit_s)) + " s limit";
  }
  failures += !o.pass;
  std::printf("%s %2d %-34s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs,
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Definitional correlations in long double.
long double oracle_pearson(const std::vector<long double>& x, const std::vector<long double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<long double> oracle_ranks(const std::vector<double>& x) {
  std::vector<long double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (double v : x) less += v < x[i], equal += v == x[i];
    r[i] = 1.0L + less + (equal - 1) / 2.0L;
  }
  return r;
}

bool constant(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
}

Outcome criterion_correlation() {
  Rng rng(20260101);
  double worst = 0;
  int degenerate = 0, tied = 0;
  for (int p = 0; p < 1000; ++p) {
    const std::size_t n = 2 + rng.uniform_index(199);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal(), y[i] = 0.5 * x[i] + rng.normal();
    if (p % 4 == 0) {
      for (auto& v : x) v = std::round(v * 2) / 2;
      for (auto& v : y) v = std::round(v * 2) / 2;
      ++tied;
    }
    const auto pc = correlate::pearson(x, y);
    const auto sc = correlate::spearman(x, y);
    if (constant(x) || constant(y)) {
      ++degenerate;
      if (!pc.degenerate || !sc.degenerate) return {false, "constant input not flagged"};
      continue;
    }
    const std::vector<long double> lx(x.begin(), x.end()), ly(y.begin(), y.end());
    const long double ps = oracle_pearson(lx, ly);
    const long double ss = oracle_pearson(oracle_ranks(x), oracle_ranks(y));
    worst = std::max({worst, static_cast<double>(std::fabs(pc.value - ps)),
                      static_cast<double>(std::fabs(sc.value - ss))});
  }
  return {worst <= 1e-10, "max abs error " + fmt("%.2e", worst) + " over 1000 pairs (" +
                              std::to_string(tied) + " with ties, " + std::to_string(degenerate) +
                              " constant)"};
}

aggregate::SampleMatrix random_samples(std::uint64_t seed, int rows, int cols, double shift) {
  aggregate::SampleMatrix m;
  m.values.resize(rows, cols);
  Rng rng(seed);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m.values(i, j) = shift * (j % 3) + rng.normal();
  }
  return m;
}

Outcome criterion_mean_transport() {
  const auto c1 = random_samples(7, 120, 64, 0.8), c2 = random_samples(8, 90, 64, -0.5);
  const auto dir = manipulate::direction_between(c1, c2);
  std::vector<std::size_t> all(64);
  std::iota(all.begin(), all.end(), 0);
  const auto plan = manipulate::make_plan(dir, all, dir.norm);
  auto moved = c1.values;
  manipulate::apply(plan, moved);
  const Eigen::RowVectorXd means = moved.colwise().mean();
  const Eigen::RowVectorXd target = c2.values.colwise().mean();
  const double err = (means - target).cwiseAbs().maxCoeff();
  return {err <= 1e-6, "max |mean - target mean| " + fmt("%.2e", err)};
}

Outcome criterion_gradients() {
  minimodel::ModelConfig c;
  c.vocab_size = 16;
  c.embed_dim = 8;
  c.n_encoder_blocks = 1;
  c.n_decoder_blocks = 1;
  c.n_heads = 2;
  c.ffn_dim = 16;
  c.max_positions = 8;
  c.seed = 5;
  auto params = minimodel::init_model(c);
  Rng rng(77);
  for (auto& t : params.tensors()) {
    for (Eigen::Index i = 0; i < t.tensor->size(); ++i) t.tensor->data()[i] += 0.3 * rng.normal();
  }
  const std::vector<minimodel::TrainExample> batch{
      {{4, 7, 9, 2}, {12, 5, 6}}, {{5, 5, 11, 13, 2}, {8}}, {{15, 2}, {4, 10, 14, 9}}};
  auto grads = minimodel::zero_params(c);
  minimodel::batch_loss(params, batch, &grads);
  const double eps = 1e-4;
  auto p_t = params.tensors();
  auto g_t = grads.tensors();
  double worst = 0;
  std::string worst_name;
  for (std::size_t t = 0; t < p_t.size(); ++t) {
    minimodel::Mat& w = *p_t[t].tensor;
    minimodel::Mat numeric(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double saved = w.data()[i];
      w.data()[i] = saved + eps;
      const double up = minimodel::batch_loss(params, batch);
      w.data()[i] = saved - eps;
      const double down = minimodel::batch_loss(params, batch);
      w.data()[i] = saved;
      numeric.data()[i] = (up - down) / (2 * eps);
    }
    const auto& analytic = *g_t[t].tensor;
    const double scale = std::max(analytic.norm(), numeric.norm());
    const double rel = scale < 1e-8 ? 0.0 : (analytic - numeric).norm() / scale;
    if (rel >= worst) worst = rel, worst_name = p_t[t].name;
  }
  return {worst < 1e-4, std::to_string(p_t.size()) + " tensors, worst relative error " +
                            fmt("%.2e", worst) + " (" + worst_name + ")"};
}

Outcome criterion_poscorr() {
  bool blocks_ok = true, attention_ok = true;
  std::string detail;
  for (auto seed : kHeldOutSeeds) {
    const auto m = evaluate::confound_medians(seed);
    blocks_ok &= m.poscorr_blocks - m.full_random_blocks > kPosCorrMargin;
    attention_ok &= m.poscorr_attention0 >= kAttention0BandLo &&
                    m.poscorr_attention0 <= kAttention0BandHi;
    detail += " s" + std::to_string(seed) + ": " + fmt("%.3f", m.poscorr_blocks) + "/" +
              fmt("%.3f", m.full_random_blocks) + " att0 " + fmt("%.3f", m.poscorr_attention0);
  }
  return {blocks_ok && attention_ok,
          std::string("block-output excess > ") + fmt("%.3f", kPosCorrMargin) + ": " +
              (blocks_ok ? "yes" : "no") + "; block-0 post-attention within [" +
              fmt("%.3f", kAttention0BandLo) + ", " + fmt("%.3f", kAttention0BandHi) +
              "]: " + (attention_ok ? "yes" : "no") + " |" + detail};
}

Outcome criterion_tokencorr() {
  bool ok = true;
  std::string detail;
  for (auto seed : kHeldOutSeeds) {
    const auto m = evaluate::confound_medians(seed);
    ok &= m.tokencorr_blocks > kRandomPairBandHi;
    detail += " s" + std::to_string(seed) + ": " + fmt("%.3f", m.tokencorr_blocks) + " vs " +
              fmt("%.3f", m.random_pair_blocks);
  }
  return {ok, "median |TokenCorr| above band " + fmt("%.3f", kRandomPairBandHi) + " |" + detail};
}

struct Toy {
  minimodel::ModelParams params;
  tensorio::ParallelCorpus dev, test;
  double accuracy = 0;
  double train_seconds = 0;
};

const Toy& toy() {
  static const Toy t = [] {
    Toy t;
    const auto t0 = std::chrono::steady_clock::now();
    const auto train_set = minimodel::synth_task(1, 5000);
    t.params = minimodel::train(minimodel::init_model({}), minimodel::training_examples(train_set),
                                {})
                   .params;
    t.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    t.dev = minimodel::synth_task(500, 300);
    t.test = minimodel::synth_task(600, 200);
    t.accuracy = minimodel::sequence_accuracy(t.params, minimodel::training_examples(t.test));
    return t;
  }();
  return t;
}

Outcome criterion_manipulation() {
  const auto& t = toy();
  if (t.accuracy < 0.99) return {false, "toy accuracy " + fmt("%.4f", t.accuracy)};
  const auto study = evaluate::toy_study(t.params, t.dev);
  const std::size_t all = study.paracorr.size();
  auto rate = [&](const evaluate::ToyStudy& s, double alpha) {
    evaluate::CurveOptions o;
    o.ks = {all};
    o.alpha = alpha;
    const auto r = evaluate::curve_experiment(t.params, s, t.test, o);
    return r.find("top-paracorr/target-form-rate")->y.back();
  };
  const double flip = rate(study, study.direction.norm);
  const double zero = rate(study, 0.0);
  double random = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto s = study;
    s.direction = manipulate::random_direction(study.direction.mean_c1, seed);
    random += rate(s, study.direction.norm) / 20;
  }
  return {flip > zero && flip > random,
          "accuracy " + fmt("%.4f", t.accuracy) + " (trained in " + fmt("%.0f", t.train_seconds) +
              " s); flip rate " + fmt("%.4f", flip) + " vs alpha=0 " + fmt("%.4f", zero) +
              " vs random mean " + fmt("%.4f", random) + " at alpha " +
              fmt("%.3f", study.direction.norm)};
}

Outcome criterion_unparalleled() {
  const auto& t = toy();
  correlate::ToyExperiment spec;
  spec.taps = minimodel::block_output_taps(t.params.config);
  const auto samples = correlate::toy_samples(spec, t.params, nullptr, t.dev);
  std::vector<double> per_split;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto split = manipulate::unparalleled_split(t.dev.size(), seed);
    const std::size_t m = std::min(split.source_rows.size(), split.paraphrase_rows.size());
    split.source_rows.resize(m);
    split.paraphrase_rows.resize(m);
    const auto a = aggregate::select_rows(samples.a, split.source_rows);
    const auto b = aggregate::select_rows(samples.b, split.paraphrase_rows);
    double sum = 0;
    const auto cs = correlate::paired_correlations(a.values, b.values, correlate::Method::Pearson);
    for (const auto& c : cs) sum += c.value;
    per_split.push_back(sum / static_cast<double>(cs.size()));
  }
  const double n = static_cast<double>(per_split.size());
  const double mean = std::accumulate(per_split.begin(), per_split.end(), 0.0) / n;
  double var = 0;
  for (double v : per_split) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / (n - 1)) / std::sqrt(n);
  return {std::abs(mean) <= 3 * se, "mean " + fmt("%.5f", mean) + ", 3 SE " + fmt("%.5f", 3 * se) +
                                        " over 100 splits"};
}

Outcome criterion_goldens() {
  const auto lex = paragen::Lexicons::load(fs::path(PARALAB_DATA_DIR) / "lexicons");
  paragen::FallbackOracle oracle;
  std::ifstream in(fs::path(PARALAB_TEST_DATA) / "paragen/golden.jsonl");
  int total = 0, exact = 0;
  std::string misses;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const auto s = paragen::annotation_from_json(j.at("sentence"));
    std::string text;
    if (j.at("kind") == "active_passive") {
      text = paragen::active_to_passive(s, lex, oracle).text;
    } else {
      const auto m = paragen::detect_adverbial_clause(s);
      text = m ? paragen::clause_to_noun_phrase(s, *m, lex, oracle).text : "";
    }
    ++total;
    if (text == j.at("expected").get<std::string>()) ++exact;
    else misses += " [" + text + "]";
  }
  return {total > 0 && exact == total,
          std::to_string(exact) + "/" + std::to_string(total) + " worked examples byte-exact" +
              misses};
}

Outcome criterion_bleu() {
  auto corpus = [](std::initializer_list<const char*> lines) {
    std::vector<evaluate::Tokens> out;
    for (const char* l : lines) out.push_back(evaluate::split_words(l));
    return out;
  };
  const auto same = corpus({"the cat sat on the mat", "a", "he took the book ."});
  const double identical = evaluate::bleu(same, same);
  const auto cand = corpus({"the cat sat on the mat", "a dog ran", "he took the book",
                            "birds fly south in winter", "it is red"});
  const auto ref = corpus({"the cat sat on a mat", "the dog ran fast", "he took the book",
                           "birds fly north in winter", "it was red"});
  const double hand = 100.0 * std::exp(1.0 - 22.0 / 21.0) *
                      std::pow((17.0 / 21.0) * (9.0 / 16.0) * (4.0 / 11.0) * (2.0 / 6.0), 0.25);
  const double got = evaluate::bleu(cand, ref);
  return {identical == 100.0 && std::abs(got - hand) < 1e-9,
          "identical " + fmt("%.17g", identical) + "; pinned " + fmt("%.15f", got) + " vs hand " +
              fmt("%.15f", hand)};
}

Outcome criterion_passive() {
  std::ifstream in(fs::path(PARALAB_TEST_DATA) / "evaluate/german_passive.jsonl");
  int total = 0, correct = 0, positives = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const bool expected = j.at("passive").get<bool>();
    positives += expected;
    correct += evaluate::is_passive(paragen::annotation_from_json(j.at("sentence"))) == expected;
    ++total;
  }
  return {total == 10 && positives == 5 && correct == total,
          std::to_string(correct) + "/" + std::to_string(total) + " fixtures (" +
              std::to_string(positives) + " positive)"};
}

Outcome criterion_erasure() {
  const auto& t = toy();
  const auto study = evaluate::toy_study(t.params, t.dev);
  std::vector<std::vector<int>> inputs;
  for (const auto& s : t.test.source) inputs.push_back(minimodel::sequence_ids(s));
  for (const auto& s : t.test.paraphrase) inputs.push_back(minimodel::sequence_ids(s));
  const auto plain = minimodel::greedy_decode_batch(t.params, inputs, 32);
  const auto erased0 = minimodel::greedy_decode_batch(
      t.params, inputs, 32, manipulate::erasure_hook({}, t.params.config));
  bool same = plain.size() == erased0.size();
  for (std::size_t i = 0; same && i < plain.size(); ++i) {
    same = plain[i].token_ids == erased0[i].token_ids;
  }

  const std::size_t n = study.paracorr.size();
  evaluate::ErasureOptions o;
  o.ks = {0, n / 8, n / 4, n / 2, 3 * n / 4, n};
  const auto r = evaluate::erasure_curve(t.params, study, t.test, o);
  const auto& top = *r.find("top-paracorr/accuracy");
  const auto& bottom = *r.find("bottom-paracorr/accuracy");
  const bool degrades = top.y.back() < top.y.front();
  bool directional = true;
  std::string curve;
  for (std::size_t i = 0; i < top.x.size(); ++i) {
    directional &= top.y[i] <= bottom.y[i];
    curve += " k" + fmt("%.0f", top.x[i]) + " " + fmt("%.4f", top.y[i]) + "/" +
             fmt("%.4f", bottom.y[i]);
  }
  return {same && degrades && directional,
          std::string("k=0 decodes identical: ") + (same ? "yes" : "no") + "; all " +
              std::to_string(n) + " final-block neurons: " + fmt("%.4f", top.y.back()) + " < " +
              fmt("%.4f", top.y.front()) + "; top <= bottom:" + curve};
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Outcome criterion_reproducibility() {
  const fs::path root =
      fs::temp_directory_path() / ("paralab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const auto runs = (root / "runs").string();
  struct Cleanup {
    fs::path p;
    ~Cleanup() { fs::remove_all(p); }
  } cleanup{root};

  if (cli({"train-toy", "--steps", "150", "--train-size", "800", "--dev-size", "80",
           "--test-size", "40", "--out", runs}) != 0) {
    return {false, "train-toy failed"};
  }
  const auto toy_dir = root / "runs/train-toy-0001";
  const auto model = (toy_dir / "model.ckpt").string();
  const auto dev = (toy_dir / "dev.jsonl").string();
  const auto test = (toy_dir / "test.jsonl").string();
  const std::vector<std::vector<std::string>> experiments = {
      {"correlate", "--kind", "random-pair", "--corpus", dev, "--model", model, "--seed", "9"},
      {"correlate", "--kind", "poscorr", "--corpus", dev, "--model", model, "--seed", "4"},
      {"manipulate", "--model", model, "--dev", dev, "--test", test, "--select", "random", "--k",
       "0,16,32", "--random-directions", "3"},
      {"erase", "--model", model, "--dev", dev, "--test", test, "--select",
       "top-paracorr,bottom-paracorr,random"}};
  for (auto args : experiments) {
    args.push_back("--out");
    args.push_back(runs);
    if (cli(args) != 0) return {false, args[0] + " failed"};
  }
  std::vector<fs::path> manifests;
  for (const auto& e : fs::directory_iterator(root / "runs")) {
    manifests.push_back(e.path() / "manifest.json");
  }
  std::sort(manifests.begin(), manifests.end());
  std::size_t csvs = 0;
  for (const auto& m : manifests) {
    if (cli({"replay", "--manifest", m.string(), "--out", (root / "replay").string()}) != 0) {
      return {false, "replay of " + m.parent_path().filename().string() + " differed"};
    }
    const auto outputs = json::parse(read_file(m)).at("outputs");
    for (const auto& [name, hash] : outputs.items()) csvs += name.ends_with(".csv");
  }
  return {true, std::to_string(manifests.size()) + " runs replayed, " + std::to_string(csvs) +
                    " CSV files byte-identical"};
}

}  // namespace

int main() {
  report(1, "correlation oracle equivalence", 5, criterion_correlation);
  report(2, "mean-transport identity", 1, criterion_mean_transport);
  report(3, "gradient check", 30, criterion_gradients);
  report(4, "PosCorr confound", 120, criterion_poscorr);
  report(5, "TokenCorr confound", 120, criterion_tokencorr);
  report(6, "end-to-end manipulation", 600, criterion_manipulation);
  report(7, "unparalleled-split control", 300, criterion_unparalleled);
  report(8, "paraphrase golden suite", 1, criterion_goldens);
  report(9, "BLEU", 1, criterion_bleu);
  report(10, "passive detector", 1, criterion_passive);
  report(11, "erasure sanity", 300, criterion_erasure);
  report(12, "reproducibility", 0, criterion_reproducibility);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
