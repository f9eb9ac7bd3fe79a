#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "corrnet/corpus.hpp"
#include "corrnet/embeddings.hpp"
#include "corrnet/neural.hpp"

namespace corrnet::training {

struct TrainConfig {
  std::size_t epochs = 100;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double grad_clip = 5.0;  // global-norm ceiling
  std::size_t batch_size = 32;
  std::size_t early_stop_patience = 10;
  double validation_fraction = 0.1;  // carved from the training findings
  std::uint64_t seed = 0;

  std::size_t hidden_size = 64;
  std::size_t head_width = 32;
  OovPolicy oov = OovPolicy::Mean;

  /// Throws ArgumentError on an out-of-range field.
  void validate() const;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN when there is no validation set

  bool operator==(const EpochLog&) const = default;
};

struct TrainReport {
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;  // 0: initial parameters were kept
  std::optional<double> test_pearson;
};

struct TrainResult {
  neural::ModelParams params;
  TrainReport report;
};

double mse_loss(double r_hat, double r);

struct AdamState {
  neural::Gradients first_moment;
  neural::Gradients second_moment;
  std::uint64_t step = 0;  // number of applied steps

  static AdamState for_params(const neural::ModelParams& params);
};

/// Scales `grads` in place so its global norm is at most `clip`. Returns the
/// norm before clipping.
double clip_global_norm(neural::Gradients& grads, double clip);

// One Adam update with bias correction, applied after global-norm clipping.
// Throws ArgumentError on a non-finite gradient, leaving params and state
// untouched.
void adam_step(neural::ModelParams& params, const neural::Gradients& grads, AdamState& state,
               const TrainConfig& config);

/// Embedded token sequences, indexed by CorrelateId.
std::vector<Sequence> embed_correlates(const Corpus& corpus, const EmbeddingTable& table,
                                       OovPolicy oov);

/// Deterministic (fit, validation) partition of `train_indices`; the fit part
/// is never empty.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> carve_validation(
    std::span<const std::size_t> train_indices, double fraction, std::uint64_t seed);

// Mini-batch Adam on MSE. Each epoch reshuffles `fit` with a seed derived from
// config.seed and the epoch number. Early stopping watches validation loss
// (training loss when `validation` is empty) and the parameters of the best
// epoch are returned.
TrainResult train_on(const Corpus& corpus, const std::vector<Sequence>& embedded,
                     std::span<const std::size_t> fit, std::span<const std::size_t> validation,
                     std::span<const std::size_t> test, const TrainConfig& config);

/// Carves validation from split.train_indices and trains. Throws ArgumentError
/// on an empty training set.
TrainResult train(const Corpus& corpus, const Split& split, const EmbeddingTable& table,
                  const TrainConfig& config);

struct Evaluation {
  double pearson_r = 0.0;
  std::vector<std::pair<double, double>> predictions;  // (r, r_hat)
};

/// Throws UndefinedStatisticError when either series has zero variance.
Evaluation evaluate(const neural::ModelParams& params, const Corpus& corpus,
                    std::span<const std::size_t> indices, const EmbeddingTable& table,
                    OovPolicy oov = OovPolicy::Mean);
Evaluation evaluate(const neural::ModelParams& params, const Corpus& corpus,
                    std::span<const std::size_t> indices, const std::vector<Sequence>& embedded);

/// Mean squared error of params over the given findings.
double mean_loss(const neural::ModelParams& params, const Corpus& corpus,
                 const std::vector<Sequence>& embedded, std::span<const std::size_t> indices);

}  // namespace corrnet::training
