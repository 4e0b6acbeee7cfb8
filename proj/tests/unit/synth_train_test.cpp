#include <doctest.h>

#include <cmath>
#include <limits>

#include "paralab/common/error.hpp"
#include "paralab/minimodel/synth.hpp"
#include "paralab/minimodel/train.hpp"

using namespace paralab::minimodel;
using paralab::tensorio::TapId;
using paralab::tensorio::TapSite;

TEST_CASE("toy vocabulary") {
  CHECK(toy_vocabulary().size() == 64);
  CHECK(toy_token_id("<eos>") == kEosId);
  CHECK(toy_detokenize(toy_tokenize("pass a1 n2 aux v3 by n4 r0")) == "pass a1 n2 aux v3 by n4 r0");
  CHECK_THROWS_AS(toy_token_id("Q9"), paralab::Error);
}

TEST_CASE("synthetic task structure") {
  auto a = synth_task(4, 300);
  auto b = synth_task(4, 300);
  CHECK(paralab::tensorio::format_corpus(a) == paralab::tensorio::format_corpus(b));
  CHECK(paralab::tensorio::format_corpus(a) !=
        paralab::tensorio::format_corpus(synth_task(5, 300)));
  CHECK_NOTHROW(a.validate());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.paraphrase[i].size() == a.source[i].size() + 2);
    CHECK(a.source[i].surface.front() == "ACT");
    CHECK(a.paraphrase[i].surface.front() == "PASS");
    CHECK(a.source[i].specials_mask.back());
    const auto& ref = (*a.references_target)[i];
    CHECK(ref.rfind("pass ", 0) == 0);
  }
  // One hand-checked pair: the object phrase moves to the front.
  auto words = a.source[0].surface;
  auto para = a.paraphrase[0].surface;
  auto verb = std::find_if(words.begin() + 1, words.end(),
                           [](const std::string& w) { return w[0] == 'V'; });
  REQUIRE(verb != words.end());
  std::vector<std::string> subj(words.begin() + 1, verb);
  auto aux = std::find(para.begin(), para.end(), "AUX");
  std::vector<std::string> obj(para.begin() + 1, aux);
  CHECK(std::search(words.begin(), words.end(), obj.begin(), obj.end()) > verb);
  auto by = std::find(para.begin(), para.end(), "BY");
  CHECK(std::equal(subj.begin(), subj.end(), by + 1));
}

TEST_CASE("zero steps leaves parameters unchanged") {
  ModelParams p = init_model(ModelConfig{});
  auto data = training_examples(synth_task(1, 10));
  TrainOptions o;
  o.steps = 0;
  auto r = train(p, data, o);
  CHECK(r.params == p);
  CHECK(r.loss_trace.empty());
}

TEST_CASE("divergence names the step") {
  ModelParams p = init_model(ModelConfig{});
  p.output_bias(0, 5) = std::numeric_limits<double>::quiet_NaN();
  TrainOptions o;
  o.steps = 3;
  try {
    train(p, training_examples(synth_task(1, 10)), o);
    FAIL("expected Divergence");
  } catch (const paralab::Error& e) {
    CHECK(e.code() == paralab::ErrorCode::Divergence);
    CHECK(std::string(e.what()).find("step 0") != std::string::npos);
  }
}

TEST_CASE("learning rate schedule") {
  TrainOptions o;
  o.steps = 1000;
  o.warmup_steps = 100;
  o.learning_rate = 1.0;
  CHECK(learning_rate_at(o, 0) == doctest::Approx(0.01));
  CHECK(learning_rate_at(o, 99) == doctest::Approx(1.0));
  CHECK(learning_rate_at(o, 550) == doctest::Approx(0.5));
  CHECK(learning_rate_at(o, 999) < 1e-4);
}

TEST_CASE("short training run learns and decodes") {
  auto data = training_examples(synth_task(1, 2000));
  TrainOptions o;
  o.steps = 400;
  auto r = train(init_model(ModelConfig{}), data, o);
  double head = 0, tail = 0;
  for (int i = 0; i < 20; ++i) {
    head += r.loss_trace[static_cast<size_t>(i)];
    tail += r.loss_trace[r.loss_trace.size() - 1 - static_cast<size_t>(i)];
  }
  CHECK(tail < 0.2 * head);

  auto held = synth_task(77, 40);
  std::vector<std::vector<int>> sources;
  for (const auto& s : held.source) sources.push_back(sequence_ids(s));
  auto base = greedy_decode_batch(r.params, sources, 32);
  for (const auto& d : base) {
    REQUIRE_FALSE(d.token_ids.empty());
    CHECK(toy_vocabulary()[static_cast<size_t>(d.token_ids[0])] == "act");
  }

  auto identity = greedy_decode_batch(r.params, sources, 32, [](TapId, Mat&) {});
  for (size_t i = 0; i < base.size(); ++i) CHECK(identity[i].token_ids == base[i].token_ids);

  auto erased = greedy_decode_batch(r.params, sources, 32, [](TapId tap, Mat& m) {
    if (tap == TapId{3, TapSite::PostResidualNorm2}) m.setZero();
  });
  int changed = 0;
  for (size_t i = 0; i < base.size(); ++i) changed += erased[i].token_ids != base[i].token_ids;
  CHECK(changed >= 1);

  auto again = greedy_decode(r.params, sources[0], 32);
  CHECK(again.token_ids == greedy_decode(r.params, sources[0], 32).token_ids);
  auto cut = greedy_decode(r.params, sources[0], 2);
  CHECK(cut.truncated);
  CHECK(cut.token_ids.size() == 2);
}
