#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "corrnet/corpus.hpp"
#include "corrnet/embeddings.hpp"

namespace corrnet {

struct SyntheticOptions {
  std::size_t n_correlates = 200;
  std::size_t n_findings = 2000;
  double noise_sd = 0.05;
  double gain = 2.0;  // kappa in r = tanh(kappa * cosine)
  std::uint64_t seed = 0;
  std::size_t min_tokens = 3;
  std::size_t max_tokens = 8;
  std::size_t correlates_per_paper = 5;
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<Vector> latents;  // indexed by CorrelateId
  std::vector<double> clean_r;  // noise-free truth, indexed like corpus.findings()
  double gain = 2.0;
};

/// tanh(gain * cosine(a, b)); a zero-norm latent gives cosine 0.
double synthetic_truth(const Vector& a, const Vector& b, double gain);

// Builds a corpus with known ground truth. Each correlate is 3-8 vocabulary
// tokens (distinct sequences) whose mean embedding is its latent. Findings are
// distinct pairs, generated paper by paper: each synthetic paper reports the
// untested pairs among a random handful of correlates. Reported r is the clipped
// noisy truth rounded to 6 fractional digits, the findings-file resolution.
// Correlate ids follow first appearance in the findings (as on reload); a
// correlate left out of every finding is dropped, which only happens when
// n_findings is small relative to n_correlates. Deterministic in `options.seed`.
SyntheticCorpus generate_synthetic(const EmbeddingTable& vocab, const SyntheticOptions& options);

}  // namespace corrnet
