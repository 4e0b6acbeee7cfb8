#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "paralab/common/error.hpp"
#include "paralab/common/rng.hpp"
#include "paralab/manipulate/manipulate.hpp"

using namespace paralab::manipulate;
using paralab::ErrorCode;
using paralab::Rng;

namespace {

SampleMatrix samples(std::uint64_t seed, int rows, int cols, double shift) {
  Rng rng(seed, 9);
  SampleMatrix m;
  m.values.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m.values(i, j) = rng.normal() + shift * (j + 1);
  }
  return m;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const paralab::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("mean transport with alpha equal to the direction norm") {
  const auto c1 = samples(1, 50, 12, 0.7), c2 = samples(2, 70, 12, -0.4);
  const auto dir = direction_between(c1, c2);
  CHECK(dir.norm == doctest::Approx(dir.delta.norm()));
  auto plan = make_plan(dir, iota(12), dir.norm);
  CHECK(plan.beta() == doctest::Approx(1.0));
  auto moved = c1.values;
  apply(plan, moved);
  const Eigen::RowVectorXd means = moved.colwise().mean();
  CHECK((means - dir.mean_c2).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("shifts touch only selected neurons") {
  const auto c1 = samples(3, 10, 6, 1.0), c2 = samples(4, 10, 6, 0.0);
  const auto dir = direction_between(c1, c2);
  auto plan = make_plan(dir, {1, 4}, 2.0);
  auto m = c1.values;
  apply(plan, m);
  for (int j = 0; j < 6; ++j) {
    const double expect = (j == 1 || j == 4) ? plan.beta() * dir.delta(j) : 0.0;
    CHECK((c1.values.col(j) - m.col(j)).cwiseAbs().maxCoeff() ==
          doctest::Approx(std::abs(expect)).epsilon(1e-12));
  }
  auto zero = c1.values;
  apply(make_plan(dir, {1, 4}, 0.0), zero);
  CHECK(zero == c1.values);
}

TEST_CASE("layer-wise application and erasure") {
  const auto c1 = samples(5, 8, 6, 1.0), c2 = samples(6, 8, 6, 0.0);
  const auto dir = direction_between(c1, c2);
  auto plan = make_plan(dir, {0, 4}, 1.0);
  Matrix layer1 = c1.values.rightCols(3);
  apply_layer(plan, 1, 3, layer1);
  CHECK(layer1.col(0) == c1.values.col(3));
  CHECK(layer1.col(1) != c1.values.col(4));
  Matrix all = c1.values;
  std::vector<std::size_t> ids = {0, 5};
  paralab::manipulate::erase(ids, all);
  CHECK(all.col(0).isZero());
  CHECK(all.col(5).isZero());
  CHECK(all.col(1) == c1.values.col(1));
  Matrix l1 = c1.values.rightCols(3);
  erase_layer(ids, 1, 3, l1);
  CHECK(l1.col(2).isZero());
  CHECK(l1.col(0) == c1.values.col(3));
}

TEST_CASE("plan validation") {
  const auto c = samples(7, 5, 4, 0.0);
  const auto same = direction_between(c, c);
  CHECK(same.norm == 0.0);
  CHECK(code_of([&] { make_plan(same, {0}, 1.0); }) == ErrorCode::ZeroNorm);
  CHECK_NOTHROW(make_plan(same, {0}, 0.0));
  const auto dir = direction_between(c, samples(8, 5, 4, 1.0));
  CHECK(code_of([&] { make_plan(dir, {4}, 1.0); }) == ErrorCode::InvalidSelection);
  CHECK(code_of([&] { make_plan(dir, {1, 1}, 1.0); }) == ErrorCode::InvalidSelection);
  CHECK(code_of([&] { make_plan(dir, {1}, -1.0); }) == ErrorCode::InvalidArgument);
  SampleMatrix empty;
  CHECK(code_of([&] { mean_activation(empty); }) == ErrorCode::EmptyInput);
}

TEST_CASE("random directions are seeded") {
  const Eigen::RowVectorXd m = Eigen::RowVectorXd::Constant(16, 0.5);
  const auto a = random_direction(m, 3), b = random_direction(m, 3), c = random_direction(m, 4);
  CHECK(a.delta == b.delta);
  CHECK(a.delta != c.delta);
  CHECK(a.random);
  CHECK(a.norm == doctest::Approx(a.delta.norm()));
}

TEST_CASE("neuron ranking and selection") {
  std::vector<double> scores = {0.1, 0.9, 0.5, 0.9, -0.2, 0.0};
  CHECK(rank_neurons(scores, Order::Desc) == std::vector<std::size_t>{1, 3, 2, 0, 5, 4});
  CHECK(rank_neurons(scores, Order::Asc) == std::vector<std::size_t>{4, 5, 0, 2, 1, 3});
  std::vector<double> bad = {0.1, std::numeric_limits<double>::quiet_NaN()};
  CHECK(code_of([&] { rank_neurons(bad, Order::Desc); }) == ErrorCode::NanScore);

  CHECK(resolve_selection({SelectionKind::TopParaCorr, 2, 0, {}}, scores, 6, 3) ==
        std::vector<std::size_t>{1, 3});
  CHECK(resolve_selection({SelectionKind::BottomParaCorr, 2, 0, {}}, scores, 6, 3) ==
        std::vector<std::size_t>{4, 5});
  const auto r1 = resolve_selection({SelectionKind::RandomK, 3, 5, {}}, {}, 6, 3);
  CHECK(r1 == resolve_selection({SelectionKind::RandomK, 3, 5, {}}, {}, 6, 3));
  CHECK(std::set<std::size_t>(r1.begin(), r1.end()).size() == 3);
  const auto longer = resolve_selection({SelectionKind::RandomK, 5, 5, {}}, {}, 6, 3);
  CHECK(std::equal(r1.begin(), r1.end(), longer.begin()));

  // Top-3 = {1, 3, 2}: two in layer 0, one in layer 1.
  const auto strat = resolve_selection({SelectionKind::LayerStratifiedRandomK, 3, 9, {}}, scores, 6, 3);
  REQUIRE(strat.size() == 3);
  CHECK(std::count_if(strat.begin(), strat.end(), [](auto id) { return id < 3; }) == 2);
  CHECK(std::count_if(strat.begin(), strat.end(), [](auto id) { return id >= 3; }) == 1);

  CHECK(resolve_selection({SelectionKind::Explicit, 0, 0, {5, 0}}, {}, 6, 3) ==
        std::vector<std::size_t>{5, 0});
  CHECK(code_of([&] { resolve_selection({SelectionKind::Explicit, 0, 0, {6}}, {}, 6, 3); }) ==
        ErrorCode::InvalidSelection);
  CHECK(code_of([&] { resolve_selection({SelectionKind::TopParaCorr, 7, 0, {}}, scores, 6, 3); }) ==
        ErrorCode::InvalidSelection);
  CHECK(parse_selection(selection_name(SelectionKind::LayerStratifiedRandomK)) ==
        SelectionKind::LayerStratifiedRandomK);
}

TEST_CASE("hooks rewrite only the final block output") {
  paralab::minimodel::ModelConfig cfg;
  cfg.embed_dim = 4;
  cfg.n_encoder_blocks = 2;
  const auto c1 = samples(10, 6, 8, 1.0), c2 = samples(11, 6, 8, 0.0);
  const auto plan = make_plan(direction_between(c1, c2), {1, 6}, 1.0);
  const auto hook = manipulation_hook(plan, cfg);
  using paralab::tensorio::TapId;
  using paralab::tensorio::TapSite;
  paralab::minimodel::Mat m = paralab::minimodel::Mat::Ones(3, 4);
  auto early = m;
  hook(TapId{0, TapSite::PostResidualNorm2}, early);
  CHECK(early == m);
  auto inner = m;
  hook(TapId{1, TapSite::PostFFN}, inner);
  CHECK(inner == m);
  auto last = m;
  hook(TapId{1, TapSite::PostResidualNorm2}, last);
  CHECK(last.col(0) == m.col(0));
  CHECK(last(0, 2) == doctest::Approx(1.0 - plan.beta() * plan.direction.delta(6)));

  const auto erase_hook = erasure_hook({5, 1}, cfg);
  auto e = m;
  erase_hook(TapId{1, TapSite::PostResidualNorm2}, e);
  CHECK(e.col(1).isZero());
  CHECK(e.col(0) == m.col(0));
  CHECK(code_of([&] { erasure_hook({8}, cfg); }) == ErrorCode::InvalidSelection);
}

TEST_CASE("magnitude grid evaluates every alpha") {
  const auto c1 = samples(12, 6, 3, 1.0), c2 = samples(13, 6, 3, 0.0);
  const auto base = make_plan(direction_between(c1, c2), {0, 1, 2}, 1.0);
  std::vector<double> alphas = {0.0, 0.5, 2.0};
  const auto rows = magnitude_grid(alphas, base, [](const ManipulationPlan& p) {
    return std::vector<std::pair<std::string, double>>{{"beta", p.beta()}};
  });
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].alpha == 2.0);
  CHECK(rows[2].metrics[0].second == doctest::Approx(2.0 / base.direction.norm));
}

TEST_CASE("unparalleled split") {
  for (std::size_t n : {2u, 3u, 10u, 101u}) {
    const auto s = unparalleled_split(n, 42);
    CHECK(s.source_rows.size() == n / 2);
    CHECK(s.paraphrase_rows.size() == n - n / 2);
    std::set<std::size_t> all(s.source_rows.begin(), s.source_rows.end());
    for (auto r : s.paraphrase_rows) CHECK(all.insert(r).second);
    CHECK(all.size() == n);
  }
  CHECK(unparalleled_split(20, 1).source_rows == unparalleled_split(20, 1).source_rows);
  CHECK(unparalleled_split(20, 1).source_rows != unparalleled_split(20, 2).source_rows);
  CHECK(code_of([] { unparalleled_split(1, 1); }) == ErrorCode::TooFewSamples);
}
