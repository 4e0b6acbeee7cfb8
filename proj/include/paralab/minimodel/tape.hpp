// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace paralab::minimodel {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
};

/// A parameter tensor and, when gradients are wanted, its accumulator.
struct ParamRef {
  const Mat* value = nullptr;
  Mat* grad = nullptr;
};

/// Row offsets of the sequences stacked into one matrix: sequence s owns
/// rows [offsets[s], offsets[s+1]).
struct Segments {
  std::vector<int> offsets{0};

  int count() const { return static_cast<int>(offsets.size()) - 1; }
  int begin(int s) const { return offsets[s]; }
  int length(int s) const { return offsets[s + 1] - offsets[s]; }
  int total() const { return offsets.back(); }
  void push(int length) { offsets.push_back(offsets.back() + length); }
};

/// Reverse-mode differentiation over row-stacked sequence matrices. Ops are
/// fused at the granularity of transformer sublayers so a training step
/// records a few dozen nodes.
class Tape {
 public:
  explicit Tape(bool record_gradients) : record_(record_gradients) {}

  Var constant(Mat value);
  /// Rows table[ids[i]] * scale. Gradients scatter into the table's grad.
  Var embed(ParamRef table, std::span<const int> ids, double scale);
  Var add(Var a, Var b);
  /// a + c where c is a fixed matrix of the same shape.
  Var add_fixed(Var a, const Mat& c);
  /// x W + b.
  Var linear(Var x, ParamRef weight, ParamRef bias);
  /// Row-wise LayerNorm with population variance and eps = 1e-5.
  Var layer_norm(Var x, ParamRef gain, ParamRef bias);
  Var relu(Var x);
  /// Multi-head scaled dot-product attention per segment. q/k/v are already
  /// projected; output is the concatenation of head outputs (no W_o).
  Var attention(Var q, Var k, Var v, const Segments& q_segments,
                const Segments& k_segments, int n_heads, bool causal);
  /// Mean token cross-entropy; returns a 1x1 node.
  Var cross_entropy(Var logits, std::span<const int> targets);

  const Mat& value(Var v) const { return nodes_[v.id].value; }
  /// In-place rewrite of a recorded value (activation hooks). Only legal on
  /// tapes that do not record gradients.
  Mat& mutable_value(Var v);

  /// Back-propagates from a 1x1 node.
  void backward(Var loss);

  static constexpr double kLayerNormEps = 1e-5;

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void()> backprop;
  };

  Var push(Mat value);
  Mat& grad(int id);
  bool has_grad(int id) const { return nodes_[id].grad.size() > 0; }

  bool record_;
  std::deque<Node> nodes_;
};

}  // namespace paralab::minimodel
