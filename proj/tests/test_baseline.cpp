#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corrnet/baseline.hpp"
#include "corrnet/errors.hpp"
#include "corrnet/random.hpp"
#include "oracles.hpp"

using namespace corrnet;
using namespace corrnet::baseline;

namespace {

Corpus named_corpus(std::size_t n_correlates) {
  Corpus corpus;
  for (std::size_t i = 0; i < n_correlates; ++i) {
    const std::string name = "c" + std::to_string(i);
    corpus.add_correlate(name, {name});
  }
  return corpus;
}

std::vector<std::size_t> all_of(const Corpus& corpus) {
  std::vector<std::size_t> idx(corpus.findings().size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

// Random corpus with possibly repeated pairs; ids 0..n-1.
Corpus random_corpus(Rng& rng, std::size_t n_correlates, std::size_t n_findings) {
  Corpus corpus = named_corpus(n_correlates);
  for (std::size_t i = 0; i < n_findings; ++i) {
    const auto a = static_cast<CorrelateId>(rng.below(n_correlates));
    auto b = static_cast<CorrelateId>(rng.below(n_correlates - 1));
    if (b >= a) ++b;
    corpus.add_finding({a, b, std::round(rng.uniform(-1.0, 1.0) * 1e6) / 1e6, "p", 2000});
  }
  return corpus;
}

}  // namespace

TEST_CASE("fit_baseline: accumulation") {
  Corpus corpus = named_corpus(3);  // a=0, b=1, c=2
  corpus.add_finding({0, 1, 0.2, "p", 2000});
  corpus.add_finding({0, 2, 0.4, "p", 2000});
  const auto model = fit_baseline(corpus, all_of(corpus));
  CHECK(model.per_correlate.at(0).sum == doctest::Approx(0.6));
  CHECK(model.per_correlate.at(0).count == 2);
  CHECK(model.global_mean == doctest::Approx(0.3));

  Corpus single = named_corpus(3);
  single.add_finding({0, 1, 0.5, "p", 2000});
  const auto one = fit_baseline(single, all_of(single));
  CHECK(one.per_correlate.at(0).mean() == 0.5);
  CHECK(one.per_correlate.at(1).mean() == 0.5);
  CHECK_FALSE(one.per_correlate.contains(2));

  CHECK_THROWS_AS(fit_baseline(single, std::vector<std::size_t>{}), ArgumentError);
}

TEST_CASE("baseline_predict: union pooling and fallback") {
  Corpus corpus = named_corpus(6);  // a b c d x y
  corpus.add_finding({0, 1, 0.2, "p", 2000});
  corpus.add_finding({0, 2, 0.4, "p", 2000});
  corpus.add_finding({1, 3, 0.6, "p", 2000});
  const auto model = fit_baseline(corpus, all_of(corpus));
  CHECK(baseline_predict(model, 0, 1) == doctest::Approx(0.4));
  CHECK(baseline_predict(model, 4, 5) == doctest::Approx(0.4));  // global mean
  CHECK(baseline_predict(model, 2, 5) == doctest::Approx(0.4));  // only c seen
  CHECK(baseline_predict(model, 3, 2) == doctest::Approx(0.5));

  const auto equal = fit_baseline(corpus, all_of(corpus), Pooling::EqualWeight);
  // mean(a) = 0.3, mean(b) = 0.4
  CHECK(baseline_predict(equal, 0, 1) == doctest::Approx(0.35));
  CHECK(baseline_predict(equal, 4, 5) == doctest::Approx(0.4));
}

TEST_CASE("baseline_predict: brute-force equivalence, symmetry and convexity") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n_correlates = 2 + rng.below(12);
    const std::size_t n_findings = 1 + rng.below(50);
    const Corpus corpus = random_corpus(rng, n_correlates, n_findings);
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < n_findings; ++i) {
      if (rng.below(4) != 0) train.push_back(i);
    }
    if (train.empty()) train.push_back(0);
    const auto model = fit_baseline(corpus, train);

    double lo = 1.0, hi = -1.0;
    for (std::size_t i : train) {
      lo = std::min(lo, corpus.findings()[i].r);
      hi = std::max(hi, corpus.findings()[i].r);
    }
    for (CorrelateId i = 0; i < n_correlates; ++i) {
      for (CorrelateId j = 0; j < n_correlates; ++j) {
        if (i == j) continue;
        const double p = baseline_predict(model, i, j);
        CHECK(std::abs(p - oracles::brute_force_baseline(corpus, train, i, j)) < 1e-12);
        CHECK(p == baseline_predict(model, j, i));
        CHECK(p >= lo - 1e-12);
        CHECK(p <= hi + 1e-12);
      }
    }
  }
}
