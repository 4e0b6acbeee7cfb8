#include <doctest.h>

#include <cmath>

#include "paralab/common/rng.hpp"
#include "paralab/minimodel/model.hpp"

using namespace paralab::minimodel;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.vocab_size = 16;
  c.embed_dim = 8;
  c.n_encoder_blocks = 1;
  c.n_decoder_blocks = 1;
  c.n_heads = 2;
  c.ffn_dim = 12;
  c.max_positions = 8;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
  ModelParams params = init_model(tiny());
  paralab::Rng rng(11);
  // Move away from the init point so norms and biases are exercised too.
  for (auto& t : params.tensors()) {
    for (Eigen::Index i = 0; i < t.tensor->size(); ++i) t.tensor->data()[i] += 0.3 * rng.normal();
  }
  std::vector<TrainExample> batch{
      {{4, 7, 9, 2}, {12, 5, 6}},
      {{5, 5, 11, 13, 2}, {8}},
      {{15, 2}, {4, 10, 14, 9}},
  };
  ModelParams grads = zero_params(params.config);
  batch_loss(params, batch, &grads);

  const double eps = 1e-4;
  auto p_t = params.tensors();
  auto g_t = grads.tensors();
  for (size_t t = 0; t < p_t.size(); ++t) {
    Mat& w = *p_t[t].tensor;
    Mat numeric(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double saved = w.data()[i];
      w.data()[i] = saved + eps;
      const double up = batch_loss(params, batch);
      w.data()[i] = saved - eps;
      const double down = batch_loss(params, batch);
      w.data()[i] = saved;
      numeric.data()[i] = (up - down) / (2 * eps);
    }
    const Mat& analytic = *g_t[t].tensor;
    const double scale = std::max(analytic.norm(), numeric.norm());
    // Key biases shift every score in a row equally, so their true gradient is
    // zero and both sides only carry round-off.
    const double rel = scale < 1e-8 ? 0.0 : (analytic - numeric).norm() / scale;
    CAPTURE(p_t[t].name);
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("unused vocabulary rows get zero gradient") {
  ModelParams params = init_model(tiny());
  ModelParams grads = zero_params(params.config);
  std::vector<TrainExample> batch{{{4, 5, 2}, {6}}};
  batch_loss(params, batch, &grads);
  CHECK(grads.source_embedding.row(9).norm() == 0.0);
  CHECK(grads.source_embedding.row(4).norm() > 0.0);
  CHECK(grads.target_embedding.row(6).norm() > 0.0);
}
