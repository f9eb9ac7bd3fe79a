#include "corrnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corrnet/errors.hpp"
#include "corrnet/random.hpp"
#include "corrnet/stats.hpp"

namespace corrnet::training {

using neural::Gradients;
using neural::ModelParams;

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be > 0");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw ArgumentError("adam beta1 must lie in (0, 1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw ArgumentError("adam beta2 must lie in (0, 1)");
  if (!(adam_epsilon > 0.0)) throw ArgumentError("adam epsilon must be > 0");
  if (!(grad_clip > 0.0)) throw ArgumentError("gradient clip must be > 0");
  if (batch_size < 1) throw ArgumentError("batch size must be >= 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ArgumentError("validation fraction must lie in [0, 1)");
  }
  if (hidden_size < 1 || head_width < 1) throw ArgumentError("model dimensions must be >= 1");
}

double mse_loss(double r_hat, double r) {
  const double e = r_hat - r;
  return e * e;
}

AdamState AdamState::for_params(const ModelParams& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

double clip_global_norm(Gradients& grads, double clip) {
  const double norm = neural::global_norm(grads);
  if (norm > clip) {
    const double scale = clip / norm;
    for (neural::Matrix* t : grads.tensors()) {
      for (double& v : t->data) v *= scale;
    }
  }
  return norm;
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
  if (!grads.all_finite()) throw ArgumentError("non-finite gradient; step rejected");

  Gradients g = grads;
  clip_global_norm(g, config.grad_clip);

  const std::uint64_t t = state.step + 1;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t));

  auto p_tensors = params.tensors();
  auto g_tensors = std::as_const(g).tensors();
  auto m_tensors = state.first_moment.tensors();
  auto v_tensors = state.second_moment.tensors();
  for (std::size_t k = 0; k < p_tensors.size(); ++k) {
    auto& p = p_tensors[k]->data;
    const auto& gk = g_tensors[k]->data;
    auto& m = m_tensors[k]->data;
    auto& v = v_tensors[k]->data;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * gk[i];
      v[i] = b2 * v[i] + (1.0 - b2) * gk[i] * gk[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
  state.step = t;
}

std::vector<Sequence> embed_correlates(const Corpus& corpus, const EmbeddingTable& table,
                                       OovPolicy oov) {
  std::vector<Sequence> out;
  out.reserve(corpus.correlates().size());
  for (const auto& c : corpus.correlates()) out.push_back(embed_sequence(c.tokens, table, oov));
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> carve_validation(
    std::span<const std::size_t> train_indices, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(train_indices.begin(), train_indices.end());
  const std::size_t n = order.size();
  auto n_val = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
  if (n_val >= n) n_val = n == 0 ? 0 : n - 1;
  Rng rng(derive_seed(seed, 0x7661));
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> validation(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> fit(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(validation.begin(), validation.end());
  std::sort(fit.begin(), fit.end());
  return {std::move(fit), std::move(validation)};
}

double mean_loss(const ModelParams& params, const Corpus& corpus,
                 const std::vector<Sequence>& embedded, std::span<const std::size_t> indices) {
  if (indices.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (std::size_t idx : indices) {
    const Finding& f = corpus.findings()[idx];
    total += mse_loss(neural::predict_pair(embedded[f.correlate_a], embedded[f.correlate_b], params), f.r);
  }
  return total / static_cast<double>(indices.size());
}

Evaluation evaluate(const ModelParams& params, const Corpus& corpus,
                    std::span<const std::size_t> indices, const std::vector<Sequence>& embedded) {
  if (indices.empty()) throw ArgumentError("evaluate needs at least one finding");
  Evaluation ev;
  std::vector<double> reported, predicted;
  for (std::size_t idx : indices) {
    const Finding& f = corpus.findings().at(idx);
    const double r_hat = neural::predict_pair(embedded[f.correlate_a], embedded[f.correlate_b], params);
    ev.predictions.emplace_back(f.r, r_hat);
    reported.push_back(f.r);
    predicted.push_back(r_hat);
  }
  ev.pearson_r = stats::pearson(reported, predicted);
  return ev;
}

Evaluation evaluate(const ModelParams& params, const Corpus& corpus,
                    std::span<const std::size_t> indices, const EmbeddingTable& table,
                    OovPolicy oov) {
  return evaluate(params, corpus, indices, embed_correlates(corpus, table, oov));
}

TrainResult train_on(const Corpus& corpus, const std::vector<Sequence>& embedded,
                     std::span<const std::size_t> fit, std::span<const std::size_t> validation,
                     std::span<const std::size_t> test, const TrainConfig& config) {
  config.validate();
  if (fit.empty()) throw ArgumentError("training set is empty");
  if (embedded.empty()) throw ArgumentError("corpus has no correlates");
  const std::size_t d = embedded.front().front().size();

  TrainResult result;
  result.params = neural::init_params(d, config.hidden_size, config.head_width, config.seed);
  ModelParams params = result.params;
  AdamState adam = AdamState::for_params(params);
  Gradients grads = params.zeros_like();

  const bool has_validation = !validation.empty();
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<std::size_t> order(fit.begin(), fit.end());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, epoch));
    rng.shuffle(std::span<std::size_t>(order));

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      for (neural::Matrix* t : grads.tensors()) std::fill(t->data.begin(), t->data.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const Finding& f = corpus.findings()[order[i]];
        const auto trace =
            neural::predict_pair_trace(embedded[f.correlate_a], embedded[f.correlate_b], params);
        neural::backward_accumulate(trace, 2.0 * (trace.r_hat - f.r) * inv_batch, params, grads);
      }
      adam_step(params, grads, adam, config);
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = mean_loss(params, corpus, embedded, fit);
    log.val_loss = has_validation ? mean_loss(params, corpus, embedded, validation)
                                  : std::numeric_limits<double>::quiet_NaN();
    result.report.epochs.push_back(log);

    const double watched = has_validation ? log.val_loss : log.train_loss;
    if (watched < best_loss) {
      best_loss = watched;
      result.params = params;
      result.report.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.early_stop_patience) {
      break;
    }
  }

  if (!test.empty()) {
    try {
      result.report.test_pearson = evaluate(result.params, corpus, test, embedded).pearson_r;
    } catch (const UndefinedStatisticError&) {
      result.report.test_pearson.reset();
    }
  }
  return result;
}

TrainResult train(const Corpus& corpus, const Split& split, const EmbeddingTable& table,
                  const TrainConfig& config) {
  config.validate();
  if (split.train_indices.empty()) throw ArgumentError("training set is empty");
  for (std::size_t idx : split.train_indices) {
    if (idx >= corpus.findings().size()) throw ArgumentError("split index out of range");
  }
  const auto embedded = embed_correlates(corpus, table, config.oov);
  auto [fit, validation] = carve_validation(split.train_indices, config.validation_fraction, config.seed);
  return train_on(corpus, embedded, fit, validation, split.test_indices, config);
}

}  // namespace corrnet::training
