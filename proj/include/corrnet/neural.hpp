#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "corrnet/embeddings.hpp"

namespace corrnet::neural {

/// Dense row-major matrix. Column vectors are rows x 1.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }

  bool operator==(const Matrix&) const = default;
};

// Weights of the shared gated recurrent encoder and the regression head.
//
//   z_t = sigmoid(W_z x_t + U_z h_{t-1} + b_z)           update gate
//   r_t = sigmoid(W_r x_t + U_r h_{t-1} + b_r)           reset gate
//   n_t = tanh(W_n x_t + U_n (r_t * h_{t-1}) + b_n)      candidate
//   h_t = (1 - z_t) * n_t + z_t * h_{t-1}
//
// Both descriptions go through the same encoder; the head sees
// c = [e_a + e_b ; |e_a - e_b|] and computes tanh(w2 . tanh(W1 c + b1) + b2).
struct ModelParams {
  std::size_t input_size = 0;   // d
  std::size_t hidden_size = 0;  // h
  std::size_t head_width = 0;   // m
  std::uint64_t seed = 0;

  Matrix w_update, w_reset, w_cand;  // h x d
  Matrix u_update, u_reset, u_cand;  // h x h
  Matrix b_update, b_reset, b_cand;  // h x 1
  Matrix head_w1;                    // m x 2h
  Matrix head_b1;                    // m x 1
  Matrix head_w2;                    // 1 x m
  Matrix head_b2;                    // 1 x 1

  static constexpr std::size_t kTensorCount = 13;
  static const std::array<std::string_view, kTensorCount>& tensor_names();

  std::array<Matrix*, kTensorCount> tensors();
  std::array<const Matrix*, kTensorCount> tensors() const;

  std::size_t parameter_count() const;
  bool all_finite() const;

  /// Same shape and metadata, every entry zero.
  ModelParams zeros_like() const;

  bool operator==(const ModelParams&) const = default;
};

using Gradients = ModelParams;

/// Uniform Glorot init on [-s, s], s = sqrt(6 / (fan_in + fan_out)); biases zero.
ModelParams init_params(std::size_t d, std::size_t h, std::size_t m, std::uint64_t seed);

/// Glorot bound used by init_params for a (rows x cols) weight.
double glorot_bound(std::size_t rows, std::size_t cols);

struct EncoderStep {
  Vector h_prev, update, reset, cand, reset_h, h;
};

struct EncoderTrace {
  Sequence inputs;
  std::vector<EncoderStep> steps;

  const Vector& output() const { return steps.back().h; }
};

struct ForwardTrace {
  EncoderTrace enc_a, enc_b;
  Vector combined;      // [e_a + e_b ; |e_a - e_b|]
  Vector diff;          // e_a - e_b, kept for the sign of |.|
  Vector head_pre;      // W1 c + b1
  Vector head_hidden;   // tanh(head_pre)
  double out_pre = 0.0; // w2 . hidden + b2
  double r_hat = 0.0;
};

/// Final hidden state from a zero initial state. `seq` must be non-empty.
Vector encode(const Sequence& seq, const ModelParams& params);
EncoderTrace encode_trace(const Sequence& seq, const ModelParams& params);

/// Pair prediction in [-1, 1], symmetric in (a, b) bit for bit.
double predict_pair(const Sequence& seq_a, const Sequence& seq_b, const ModelParams& params);
ForwardTrace predict_pair_trace(const Sequence& seq_a, const Sequence& seq_b,
                                const ModelParams& params);

/// Reverse-mode gradients of a loss L given upstream = dL/dr_hat.
Gradients backward(const ForwardTrace& trace, double upstream, const ModelParams& params);

/// As backward(), adding into `grads` (which must be shaped like params).
void backward_accumulate(const ForwardTrace& trace, double upstream, const ModelParams& params,
                         Gradients& grads);

/// Back-propagates dL/d(final hidden state) through one encoder pass, adding
/// into the encoder blocks of `grads`.
void encoder_backward(const EncoderTrace& trace, const Vector& d_output, const ModelParams& params,
                      Gradients& grads);

/// dL/de_a and dL/de_b produced by the head for the given upstream.
struct HeadGradients {
  Vector d_enc_a, d_enc_b;
};
HeadGradients head_backward(const ForwardTrace& trace, double upstream, const ModelParams& params,
                            Gradients& grads);

double global_norm(const Gradients& grads);

}  // namespace corrnet::neural
