// Copyright (C) 2026 The Paralab Authors
// SPDX-License-Identifier: Apache-2.0

#include "paralab/minimodel/tape.hpp"

#include <cmath>
#include <limits>

#include "paralab/common/error.hpp"

namespace paralab::minimodel {

Var Tape::push(Mat value) {
  nodes_.push_back(Node{std::move(value), Mat(), nullptr});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Mat& Tape::grad(int id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Mat& Tape::mutable_value(Var v) {
  if (record_) fail(ErrorCode::InvalidArgument, "cannot rewrite values on a gradient tape");
  return nodes_[v.id].value;
}

Var Tape::constant(Mat value) { return push(std::move(value)); }

Var Tape::embed(ParamRef table, std::span<const int> ids, double scale) {
  const Mat& t = *table.value;
  Mat out(static_cast<Eigen::Index>(ids.size()), t.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= t.rows()) {
      fail(ErrorCode::InvalidSequence, "token id " + std::to_string(ids[i]) + " out of vocabulary");
    }
    out.row(static_cast<Eigen::Index>(i)) = t.row(ids[i]) * scale;
  }
  Var v = push(std::move(out));
  if (record_ && table.grad) {
    std::vector<int> saved(ids.begin(), ids.end());
    Mat* g = table.grad;
    int id = v.id;
    nodes_[id].backprop = [this, id, saved = std::move(saved), g, scale] {
      const Mat& dy = nodes_[id].grad;
      for (size_t i = 0; i < saved.size(); ++i) {
        g->row(saved[i]) += dy.row(static_cast<Eigen::Index>(i)) * scale;
      }
    };
  }
  return v;
}

Var Tape::add(Var a, Var b) {
  Var v = push(value(a) + value(b));
  if (record_) {
    int id = v.id;
    nodes_[id].backprop = [this, id, a, b] {
      grad(a.id) += nodes_[id].grad;
      grad(b.id) += nodes_[id].grad;
    };
  }
  return v;
}

Var Tape::add_fixed(Var a, const Mat& c) {
  Var v = push(value(a) + c);
  if (record_) {
    int id = v.id;
    nodes_[id].backprop = [this, id, a] { grad(a.id) += nodes_[id].grad; };
  }
  return v;
}

Var Tape::linear(Var x, ParamRef weight, ParamRef bias) {
  Mat out(value(x).rows(), weight.value->cols());
  out.noalias() = value(x) * (*weight.value);
  out.rowwise() += bias.value->row(0);
  Var v = push(std::move(out));
  if (record_) {
    int id = v.id;
    nodes_[id].backprop = [this, id, x, weight, bias] {
      const Mat& dy = nodes_[id].grad;
      if (weight.grad) weight.grad->noalias() += value(x).transpose() * dy;
      if (bias.grad) bias.grad->row(0) += dy.colwise().sum();
      grad(x.id).noalias() += dy * weight.value->transpose();
    };
  }
  return v;
}

Var Tape::layer_norm(Var x, ParamRef gain, ParamRef bias) {
  const Mat& in = value(x);
  const Eigen::Index n = in.rows(), d = in.cols();
  Mat xhat(n, d);
  Eigen::VectorXd inv_std(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    double mean = in.row(r).mean();
    auto centered = in.row(r).array() - mean;
    double var = centered.square().mean();
    inv_std[r] = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(r) = centered * inv_std[r];
  }
  Mat out = xhat;
  out.array().rowwise() *= gain.value->row(0).array();
  out.rowwise() += bias.value->row(0);
  Var v = push(std::move(out));
  if (record_) {
    int id = v.id;
    nodes_[id].backprop = [this, id, x, gain, bias, xhat = std::move(xhat),
                           inv_std = std::move(inv_std)] {
      const Mat& dy = nodes_[id].grad;
      if (gain.grad) gain.grad->row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
      if (bias.grad) bias.grad->row(0) += dy.colwise().sum();
      Mat& dx = grad(x.id);
      const double d = static_cast<double>(xhat.cols());
      for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
        Eigen::RowVectorXd g = dy.row(r).array() * gain.value->row(0).array();
        double mean_g = g.mean();
        double mean_gx = g.dot(xhat.row(r)) / d;
        dx.row(r).array() += inv_std[r] * (g.array() - mean_g - xhat.row(r).array() * mean_gx);
      }
    };
  }
  return v;
}

Var Tape::relu(Var x) {
  Var v = push(value(x).cwiseMax(0.0));
  if (record_) {
    int id = v.id;
    nodes_[id].backprop = [this, id, x] {
      grad(x.id).array() +=
          (value(x).array() > 0.0).cast<double>() * nodes_[id].grad.array();
    };
  }
  return v;
}

Var Tape::attention(Var q, Var k, Var v, const Segments& q_segments,
                    const Segments& k_segments, int n_heads, bool causal) {
  const Mat& Q = value(q);
  const Mat& K = value(k);
  const Mat& V = value(v);
  const Eigen::Index d = Q.cols();
  if (q_segments.count() != k_segments.count() || q_segments.total() != Q.rows() ||
      k_segments.total() != K.rows() || d % n_heads != 0) {
    fail(ErrorCode::SizeMismatch, "attention shapes disagree");
  }
  const Eigen::Index dh = d / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Mat out = Mat::Zero(Q.rows(), d);
  std::vector<Mat> probs;
  probs.reserve(static_cast<size_t>(q_segments.count() * n_heads));
  for (int s = 0; s < q_segments.count(); ++s) {
    const int q0 = q_segments.begin(s), nq = q_segments.length(s);
    const int k0 = k_segments.begin(s), nk = k_segments.length(s);
    for (int h = 0; h < n_heads; ++h) {
      Mat scores(nq, nk);
      scores.noalias() = Q.block(q0, h * dh, nq, dh) * K.block(k0, h * dh, nk, dh).transpose();
      scores *= scale;
      for (int i = 0; i < nq; ++i) {
        int limit = causal ? std::min(i + 1, nk) : nk;
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < limit; ++j) mx = std::max(mx, scores(i, j));
        double sum = 0.0;
        for (int j = 0; j < nk; ++j) {
          double e = j < limit ? std::exp(scores(i, j) - mx) : 0.0;
          scores(i, j) = e;
          sum += e;
        }
        scores.row(i) /= sum;
      }
      out.block(q0, h * dh, nq, dh).noalias() = scores * V.block(k0, h * dh, nk, dh);
      probs.push_back(std::move(scores));
    }
  }
  Var result = push(std::move(out));
  if (record_) {
    int id = result.id;
    nodes_[id].backprop = [this, id, q, k, v, qs = q_segments, ks = k_segments, n_heads, dh,
                           scale, probs = std::move(probs)] {
      const Mat& dy = nodes_[id].grad;
      const Mat& Q = value(q);
      const Mat& K = value(k);
      const Mat& V = value(v);
      Mat& dq = grad(q.id);
      Mat& dk = grad(k.id);
      Mat& dv = grad(v.id);
      size_t idx = 0;
      for (int s = 0; s < qs.count(); ++s) {
        const int q0 = qs.begin(s), nq = qs.length(s);
        const int k0 = ks.begin(s), nk = ks.length(s);
        for (int h = 0; h < n_heads; ++h, ++idx) {
          const Mat& P = probs[idx];
          auto dO = dy.block(q0, h * dh, nq, dh);
          dv.block(k0, h * dh, nk, dh).noalias() += P.transpose() * dO;
          Mat dP(nq, nk);
          dP.noalias() = dO * V.block(k0, h * dh, nk, dh).transpose();
          Eigen::VectorXd row_dot = (dP.array() * P.array()).rowwise().sum();
          Mat dS = (P.array() * (dP.array().colwise() - row_dot.array())).matrix() * scale;
          dq.block(q0, h * dh, nq, dh).noalias() += dS * K.block(k0, h * dh, nk, dh);
          dk.block(k0, h * dh, nk, dh).noalias() += dS.transpose() * Q.block(q0, h * dh, nq, dh);
        }
      }
    };
  }
  return result;
}

Var Tape::cross_entropy(Var logits, std::span<const int> targets) {
  const Mat& z = value(logits);
  if (static_cast<Eigen::Index>(targets.size()) != z.rows()) {
    fail(ErrorCode::SizeMismatch, "target count does not match logits");
  }
  Mat probs(z.rows(), z.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    double mx = z.row(r).maxCoeff();
    probs.row(r) = (z.row(r).array() - mx).exp();
    double sum = probs.row(r).sum();
    probs.row(r) /= sum;
    total += -(z(r, targets[r]) - mx - std::log(sum));
  }
  const double n = static_cast<double>(z.rows());
  Mat out(1, 1);
  out(0, 0) = total / n;
  Var v = push(std::move(out));
  if (record_) {
    int id = v.id;
    std::vector<int> saved(targets.begin(), targets.end());
    nodes_[id].backprop = [this, id, logits, probs = std::move(probs), saved = std::move(saved),
                           n] {
      double g = nodes_[id].grad(0, 0) / n;
      Mat& dz = grad(logits.id);
      dz += probs * g;
      for (size_t r = 0; r < saved.size(); ++r) dz(static_cast<Eigen::Index>(r), saved[r]) -= g;
    };
  }
  return v;
}

void Tape::backward(Var loss) {
  if (!record_) fail(ErrorCode::InvalidArgument, "tape does not record gradients");
  grad(loss.id)(0, 0) += 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.backprop && has_grad(i)) n.backprop();
  }
}

}  // namespace paralab::minimodel
