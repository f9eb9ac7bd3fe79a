#include "corrnet/neural.hpp"

#include <cmath>

#include "corrnet/errors.hpp"
#include "corrnet/random.hpp"

namespace corrnet::neural {

const std::array<std::string_view, ModelParams::kTensorCount>& ModelParams::tensor_names() {
  static const std::array<std::string_view, kTensorCount> names = {
      "w_update", "w_reset", "w_cand", "u_update", "u_reset", "u_cand", "b_update",
      "b_reset",  "b_cand",  "head_w1", "head_b1", "head_w2", "head_b2"};
  return names;
}

std::array<Matrix*, ModelParams::kTensorCount> ModelParams::tensors() {
  return {&w_update, &w_reset, &w_cand,  &u_update, &u_reset, &u_cand, &b_update,
          &b_reset,  &b_cand,  &head_w1, &head_b1,  &head_w2, &head_b2};
}

std::array<const Matrix*, ModelParams::kTensorCount> ModelParams::tensors() const {
  return {&w_update, &w_reset, &w_cand,  &u_update, &u_reset, &u_cand, &b_update,
          &b_reset,  &b_cand,  &head_w1, &head_b1,  &head_w2, &head_b2};
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const Matrix* t : tensors()) n += t->size();
  return n;
}

bool ModelParams::all_finite() const {
  for (const Matrix* t : tensors()) {
    for (double v : t->data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (Matrix* t : z.tensors()) std::fill(t->data.begin(), t->data.end(), 0.0);
  return z;
}

double glorot_bound(std::size_t rows, std::size_t cols) {
  return std::sqrt(6.0 / static_cast<double>(rows + cols));
}

ModelParams init_params(std::size_t d, std::size_t h, std::size_t m, std::uint64_t seed) {
  if (d < 1 || h < 1 || m < 1) throw ArgumentError("model dimensions must be >= 1");
  ModelParams p;
  p.input_size = d;
  p.hidden_size = h;
  p.head_width = m;
  p.seed = seed;
  p.w_update = p.w_reset = p.w_cand = Matrix(h, d);
  p.u_update = p.u_reset = p.u_cand = Matrix(h, h);
  p.b_update = p.b_reset = p.b_cand = Matrix(h, 1);
  p.head_w1 = Matrix(m, 2 * h);
  p.head_b1 = Matrix(m, 1);
  p.head_w2 = Matrix(1, m);
  p.head_b2 = Matrix(1, 1);

  Rng rng(seed);
  for (Matrix* w : {&p.w_update, &p.w_reset, &p.w_cand, &p.u_update, &p.u_reset, &p.u_cand,
                    &p.head_w1, &p.head_w2}) {
    // fan_in = cols, fan_out = rows
    const double s = glorot_bound(w->rows, w->cols);
    for (double& v : w->data) v = rng.uniform(-s, s);
  }
  return p;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// out += M x
void matvec_add(Vector& out, const Matrix& m, const double* x) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* row = &m.data[i * m.cols];
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += row[j] * x[j];
    out[i] += acc;
  }
}

// out += M^T v
void mattvec_add(Vector& out, const Matrix& m, const Vector& v) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* row = &m.data[i * m.cols];
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += row[j] * vi;
  }
}

// G += u v^T
void outer_add(Matrix& g, const Vector& u, const double* v) {
  for (std::size_t i = 0; i < g.rows; ++i) {
    const double ui = u[i];
    if (ui == 0.0) continue;
    double* row = &g.data[i * g.cols];
    for (std::size_t j = 0; j < g.cols; ++j) row[j] += ui * v[j];
  }
}

void vec_add(Matrix& g, const Vector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) g.data[i] += v[i];
}

Vector bias_copy(const Matrix& b) { return Vector(b.data.begin(), b.data.end()); }

}  // namespace

EncoderTrace encode_trace(const Sequence& seq, const ModelParams& params) {
  if (seq.empty()) throw ArgumentError("cannot encode an empty sequence");
  const std::size_t h = params.hidden_size;
  EncoderTrace trace;
  trace.inputs = seq;
  trace.steps.reserve(seq.size());
  Vector h_prev(h, 0.0);
  for (const Vector& x : seq) {
    if (x.size() != params.input_size) throw ArgumentError("input vector length does not match model");
    EncoderStep s;
    s.h_prev = h_prev;
    s.update = bias_copy(params.b_update);
    s.reset = bias_copy(params.b_reset);
    matvec_add(s.update, params.w_update, x.data());
    matvec_add(s.update, params.u_update, h_prev.data());
    matvec_add(s.reset, params.w_reset, x.data());
    matvec_add(s.reset, params.u_reset, h_prev.data());
    for (std::size_t i = 0; i < h; ++i) {
      s.update[i] = sigmoid(s.update[i]);
      s.reset[i] = sigmoid(s.reset[i]);
    }
    s.reset_h.resize(h);
    for (std::size_t i = 0; i < h; ++i) s.reset_h[i] = s.reset[i] * h_prev[i];
    s.cand = bias_copy(params.b_cand);
    matvec_add(s.cand, params.w_cand, x.data());
    matvec_add(s.cand, params.u_cand, s.reset_h.data());
    s.h.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
      s.cand[i] = std::tanh(s.cand[i]);
      s.h[i] = (1.0 - s.update[i]) * s.cand[i] + s.update[i] * h_prev[i];
    }
    h_prev = s.h;
    trace.steps.push_back(std::move(s));
  }
  return trace;
}

Vector encode(const Sequence& seq, const ModelParams& params) {
  return encode_trace(seq, params).output();
}

ForwardTrace predict_pair_trace(const Sequence& seq_a, const Sequence& seq_b,
                                const ModelParams& params) {
  ForwardTrace t;
  t.enc_a = encode_trace(seq_a, params);
  t.enc_b = encode_trace(seq_b, params);
  const Vector& ea = t.enc_a.output();
  const Vector& eb = t.enc_b.output();
  const std::size_t h = params.hidden_size;

  t.combined.resize(2 * h);
  t.diff.resize(h);
  for (std::size_t i = 0; i < h; ++i) {
    t.combined[i] = ea[i] + eb[i];
    t.diff[i] = ea[i] - eb[i];
    t.combined[h + i] = std::abs(t.diff[i]);
  }

  t.head_pre = bias_copy(params.head_b1);
  matvec_add(t.head_pre, params.head_w1, t.combined.data());
  t.head_hidden.resize(t.head_pre.size());
  for (std::size_t i = 0; i < t.head_pre.size(); ++i) t.head_hidden[i] = std::tanh(t.head_pre[i]);

  double out = params.head_b2.data[0];
  for (std::size_t i = 0; i < t.head_hidden.size(); ++i) out += params.head_w2.data[i] * t.head_hidden[i];
  t.out_pre = out;
  t.r_hat = std::tanh(out);
  return t;
}

double predict_pair(const Sequence& seq_a, const Sequence& seq_b, const ModelParams& params) {
  return predict_pair_trace(seq_a, seq_b, params).r_hat;
}

void encoder_backward(const EncoderTrace& trace, const Vector& d_output, const ModelParams& params,
                      Gradients& grads) {
  const std::size_t h = params.hidden_size;
  Vector dh = d_output;
  Vector d_cand_pre(h), d_update_pre(h), d_reset_pre(h), d_reset_h(h), dh_prev(h);

  for (std::size_t t = trace.steps.size(); t-- > 0;) {
    const EncoderStep& s = trace.steps[t];
    const double* x = trace.inputs[t].data();

    for (std::size_t i = 0; i < h; ++i) {
      const double dn = dh[i] * (1.0 - s.update[i]);
      const double dz = dh[i] * (s.h_prev[i] - s.cand[i]);
      d_cand_pre[i] = dn * (1.0 - s.cand[i] * s.cand[i]);
      d_update_pre[i] = dz * s.update[i] * (1.0 - s.update[i]);
      dh_prev[i] = dh[i] * s.update[i];
    }

    outer_add(grads.w_cand, d_cand_pre, x);
    outer_add(grads.u_cand, d_cand_pre, s.reset_h.data());
    vec_add(grads.b_cand, d_cand_pre);
    std::fill(d_reset_h.begin(), d_reset_h.end(), 0.0);
    mattvec_add(d_reset_h, params.u_cand, d_cand_pre);

    for (std::size_t i = 0; i < h; ++i) {
      const double dr = d_reset_h[i] * s.h_prev[i];
      d_reset_pre[i] = dr * s.reset[i] * (1.0 - s.reset[i]);
      dh_prev[i] += d_reset_h[i] * s.reset[i];
    }

    outer_add(grads.w_update, d_update_pre, x);
    outer_add(grads.u_update, d_update_pre, s.h_prev.data());
    vec_add(grads.b_update, d_update_pre);
    mattvec_add(dh_prev, params.u_update, d_update_pre);

    outer_add(grads.w_reset, d_reset_pre, x);
    outer_add(grads.u_reset, d_reset_pre, s.h_prev.data());
    vec_add(grads.b_reset, d_reset_pre);
    mattvec_add(dh_prev, params.u_reset, d_reset_pre);

    dh.swap(dh_prev);
  }
}

HeadGradients head_backward(const ForwardTrace& trace, double upstream, const ModelParams& params,
                            Gradients& grads) {
  const std::size_t h = params.hidden_size;
  const std::size_t m = params.head_width;

  const double d_out_pre = upstream * (1.0 - trace.r_hat * trace.r_hat);
  grads.head_b2.data[0] += d_out_pre;
  Vector d_head_pre(m);
  for (std::size_t i = 0; i < m; ++i) {
    grads.head_w2.data[i] += d_out_pre * trace.head_hidden[i];
    const double dg = d_out_pre * params.head_w2.data[i];
    d_head_pre[i] = dg * (1.0 - trace.head_hidden[i] * trace.head_hidden[i]);
  }
  outer_add(grads.head_w1, d_head_pre, trace.combined.data());
  vec_add(grads.head_b1, d_head_pre);

  Vector d_combined(2 * h, 0.0);
  mattvec_add(d_combined, params.head_w1, d_head_pre);

  HeadGradients out{Vector(h), Vector(h)};
  for (std::size_t i = 0; i < h; ++i) {
    const double sign = trace.diff[i] > 0.0 ? 1.0 : (trace.diff[i] < 0.0 ? -1.0 : 0.0);
    const double d_diff = d_combined[h + i] * sign;
    out.d_enc_a[i] = d_combined[i] + d_diff;
    out.d_enc_b[i] = d_combined[i] - d_diff;
  }
  return out;
}

void backward_accumulate(const ForwardTrace& trace, double upstream, const ModelParams& params,
                         Gradients& grads) {
  if (upstream == 0.0) return;
  const HeadGradients head = head_backward(trace, upstream, params, grads);
  encoder_backward(trace.enc_a, head.d_enc_a, params, grads);
  encoder_backward(trace.enc_b, head.d_enc_b, params, grads);
}

Gradients backward(const ForwardTrace& trace, double upstream, const ModelParams& params) {
  Gradients grads = params.zeros_like();
  backward_accumulate(trace, upstream, params, grads);
  return grads;
}

double global_norm(const Gradients& grads) {
  double ss = 0.0;
  for (const Matrix* t : grads.tensors()) {
    for (double v : t->data) ss += v * v;
  }
  return std::sqrt(ss);
}

}  // namespace corrnet::neural
