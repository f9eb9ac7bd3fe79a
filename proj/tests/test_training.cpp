#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "corrnet/errors.hpp"
#include "corrnet/synthetic.hpp"
#include "corrnet/training.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace corrnet;
using namespace corrnet::training;
using neural::ModelParams;

namespace {

const EmbeddingTable& vocab() {
  static const EmbeddingTable table = load_embeddings(corrnet::testing::data_path("embeddings16.txt"));
  return table;
}

SyntheticCorpus small_corpus(std::size_t n_correlates, std::size_t n_findings, std::uint64_t seed,
                             double noise = 0.0) {
  SyntheticOptions opts;
  opts.n_correlates = n_correlates;
  opts.n_findings = n_findings;
  opts.noise_sd = noise;
  opts.seed = seed;
  return generate_synthetic(vocab(), opts);
}

TrainConfig small_config() {
  TrainConfig c;
  c.hidden_size = 6;
  c.head_width = 4;
  c.epochs = 20;
  c.learning_rate = 1e-2;
  c.batch_size = 8;
  c.seed = 3;
  return c;
}

std::vector<std::size_t> all_indices(const Corpus& corpus) {
  std::vector<std::size_t> idx(corpus.findings().size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

TEST_CASE("mse_loss") {
  CHECK(mse_loss(0.5, 0.5) == 0.0);
  CHECK(mse_loss(1.0, -1.0) == 4.0);
  CHECK(mse_loss(0.3, 0.0) == doctest::Approx(0.09));
}

TEST_CASE("adam_step: zero gradient leaves parameters and decays moments") {
  auto params = oracles::random_params(2, 2, 2, 1);
  const auto before = params;
  auto state = AdamState::for_params(params);
  state.first_moment.head_b2.data[0] = 0.4;
  state.second_moment.head_b2.data[0] = 0.2;
  TrainConfig config;
  adam_step(params, params.zeros_like(), state, config);
  // m decays to 0.36; the bias-corrected step is nonzero only where m is.
  CHECK(state.first_moment.head_b2.data[0] == doctest::Approx(0.36));
  CHECK(state.second_moment.head_b2.data[0] == doctest::Approx(0.2 * 0.999));
  CHECK(state.step == 1);
  auto reset = before;
  reset.head_b2 = params.head_b2;
  CHECK(params == reset);

  auto fresh = before;
  auto fresh_state = AdamState::for_params(fresh);
  adam_step(fresh, fresh.zeros_like(), fresh_state, config);
  CHECK(fresh == before);
}

TEST_CASE("adam_step: one scalar step by hand") {
  auto params = oracles::random_params(1, 1, 1, 2);
  const double p0 = params.head_b2.data[0];
  auto grads = params.zeros_like();
  grads.head_b2.data[0] = 0.5;
  auto state = AdamState::for_params(params);
  TrainConfig config;
  config.learning_rate = 0.1;
  adam_step(params, grads, state, config);
  // m = 0.05, v = 0.00025, m_hat = 0.5, v_hat = 0.25
  const double expected = p0 - 0.1 * 0.5 / (0.5 + 1e-8);
  CHECK(params.head_b2.data[0] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(state.first_moment.head_b2.data[0] == doctest::Approx(0.05));
  CHECK(state.second_moment.head_b2.data[0] == doctest::Approx(0.00025));
}

TEST_CASE("clip_global_norm") {
  auto grads = oracles::random_params(2, 2, 2, 1).zeros_like();
  grads.w_update.data[0] = 6.0;
  grads.head_w2.data[1] = 8.0;
  CHECK(clip_global_norm(grads, 1.0) == doctest::Approx(10.0));
  CHECK(neural::global_norm(grads) == doctest::Approx(1.0));
  CHECK(grads.w_update.data[0] == doctest::Approx(0.6));

  auto small = grads;
  CHECK(clip_global_norm(small, 5.0) == doctest::Approx(1.0));
  CHECK(small == grads);
}

TEST_CASE("adam_step: non-finite gradient is rejected without side effects") {
  auto params = oracles::random_params(2, 2, 2, 4);
  const auto before = params;
  auto state = AdamState::for_params(params);
  auto grads = params.zeros_like();
  grads.u_cand.data[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(adam_step(params, grads, state, TrainConfig{}), ArgumentError);
  CHECK(params == before);
  CHECK(state.step == 0);
  grads.u_cand.data[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(adam_step(params, grads, state, TrainConfig{}), ArgumentError);
  CHECK(params == before);
}

TEST_CASE("TrainConfig::validate") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = TrainConfig{};
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = TrainConfig{};
  c.validation_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("carve_validation: partition with a non-empty fit set") {
  std::vector<std::size_t> train(20);
  std::iota(train.begin(), train.end(), std::size_t{100});
  const auto [fit, val] = carve_validation(train, 0.1, 5);
  CHECK(val.size() == 2);
  CHECK(fit.size() == 18);
  CHECK(carve_validation(train, 0.1, 5) == std::make_pair(fit, val));

  const std::vector<std::size_t> one = {7};
  const auto [f1, v1] = carve_validation(one, 0.9, 1);
  CHECK(f1 == one);
  CHECK(v1.empty());
  const auto [f0, v0] = carve_validation(train, 0.0, 1);
  CHECK(f0 == train);
  CHECK(v0.empty());
}

TEST_CASE("train: zero epochs returns the initial parameters") {
  const auto syn = small_corpus(10, 20, 1);
  auto config = small_config();
  config.epochs = 0;
  const auto split = split_corpus(syn.corpus, 0.8, 1);
  const auto result = train(syn.corpus, split, vocab(), config);
  CHECK(result.report.epochs.empty());
  CHECK(result.report.best_epoch == 0);
  CHECK(result.params == neural::init_params(vocab().dim(), 6, 4, config.seed));
}

TEST_CASE("train: empty training set") {
  const auto syn = small_corpus(10, 20, 1);
  Split split;
  split.test_indices = all_indices(syn.corpus);
  CHECK_THROWS_AS(train(syn.corpus, split, vocab(), small_config()), ArgumentError);
}

TEST_CASE("train: identical seeds give identical results") {
  const auto syn = small_corpus(20, 60, 2, 0.05);
  const auto split = split_corpus(syn.corpus, 0.8, 2);
  const auto a = train(syn.corpus, split, vocab(), small_config());
  const auto b = train(syn.corpus, split, vocab(), small_config());
  CHECK(a.params == b.params);
  CHECK(a.report.epochs == b.report.epochs);
  CHECK(a.report.best_epoch == b.report.best_epoch);
  CHECK(a.report.test_pearson == b.report.test_pearson);

  auto other = small_config();
  other.seed = 4;
  CHECK_FALSE(train(syn.corpus, split, vocab(), other).params == a.params);
}

TEST_CASE("train_on: loss decreases on a four-finding corpus") {
  const auto syn = small_corpus(6, 4, 8);
  const auto embedded = embed_correlates(syn.corpus, vocab(), OovPolicy::Mean);
  const auto fit = all_indices(syn.corpus);
  auto config = small_config();
  config.epochs = 60;
  config.early_stop_patience = 1000;
  const auto init = neural::init_params(vocab().dim(), config.hidden_size, config.head_width, config.seed);
  const double initial = mean_loss(init, syn.corpus, embedded, fit);
  const auto result = train_on(syn.corpus, embedded, fit, {}, {}, config);
  CHECK(result.report.epochs.size() == 60);
  CHECK(mean_loss(result.params, syn.corpus, embedded, fit) < 0.5 * initial);
  CHECK(std::isnan(result.report.epochs.front().val_loss));
}

TEST_CASE("train: early stopping keeps the best validation epoch") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto syn = small_corpus(30, 120, seed, 0.3);
    const auto split = split_corpus(syn.corpus, 0.8, seed);
    auto config = small_config();
    config.epochs = 80;
    config.early_stop_patience = 3;
    config.learning_rate = 3e-2;
    config.validation_fraction = 0.25;
    config.seed = seed;
    const auto result = train(syn.corpus, split, vocab(), config);
    const auto& log = result.report.epochs;
    REQUIRE(!log.empty());
    REQUIRE(result.report.best_epoch >= 1);

    std::size_t argmin = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
      CHECK(log[i].epoch == i + 1);
      if (log[i].val_loss < log[argmin].val_loss) argmin = i;
    }
    CHECK(result.report.best_epoch == argmin + 1);
    CHECK(log.size() <= result.report.best_epoch + config.early_stop_patience);
    if (log.size() < config.epochs) {
      CHECK(log.size() == result.report.best_epoch + config.early_stop_patience);
    }

    const auto embedded = embed_correlates(syn.corpus, vocab(), config.oov);
    const auto [fit, val] = carve_validation(split.train_indices, config.validation_fraction, config.seed);
    CHECK(mean_loss(result.params, syn.corpus, embedded, val) == log[argmin].val_loss);
  }
}

TEST_CASE("evaluate: perfect predictions and zero variance") {
  const auto syn = small_corpus(10, 20, 3);
  const auto embedded = embed_correlates(syn.corpus, vocab(), OovPolicy::Mean);
  const auto idx = all_indices(syn.corpus);
  const auto params = neural::init_params(vocab().dim(), 3, 2, 1).zeros_like();
  // Zero parameters predict 0 everywhere.
  CHECK_THROWS_AS(evaluate(params, syn.corpus, idx, embedded), UndefinedStatisticError);
  const auto trained = train_on(syn.corpus, embedded, idx, {}, {}, small_config());
  const auto ev = evaluate(trained.params, syn.corpus, idx, embedded);
  CHECK(ev.predictions.size() == idx.size());
  CHECK(ev.pearson_r >= -1.0);
  CHECK(ev.pearson_r <= 1.0);
}
