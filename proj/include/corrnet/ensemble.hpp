#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "corrnet/corpus.hpp"
#include "corrnet/embeddings.hpp"
#include "corrnet/neural.hpp"
#include "corrnet/stats.hpp"
#include "corrnet/training.hpp"

namespace corrnet::ensemble {

/// Committee of independently trained models. N >= 2, seeds pairwise distinct.
struct Ensemble {
  std::vector<neural::ModelParams> members;
  std::vector<std::uint64_t> member_seeds;
  bool bagging = true;

  std::size_t size() const { return members.size(); }
};

struct EnsembleEstimate {
  PairKey pair;
  double mean = 0.0;
  double disagreement = 0.0;  // sample sd over members, divisor N - 1
  double ci_half_width = 0.0; // 1.96 * disagreement / sqrt(N)

  bool operator==(const EnsembleEstimate&) const = default;
};

double ci_half_width(double disagreement, std::size_t n_members);

/// Mean, sample sd and CI half-width of N >= 2 member predictions.
EnsembleEstimate summarize_predictions(std::span<const double> predictions, PairKey pair = {});

struct EnsembleOptions {
  std::size_t members = 50;
  bool bagging = true;
  std::size_t jobs = 1;  // worker threads; 0 = hardware concurrency
};

// Trains one committee member with the given seed (init and shuffling). With
// bagging, validation is carved from split.train_indices first and the fit set
// is a same-size bootstrap resample of the remainder.
training::TrainResult train_member(const Corpus& corpus, const Split& split,
                                   const std::vector<Sequence>& embedded,
                                   const training::TrainConfig& config, std::uint64_t member_seed,
                                   bool bagging);

/// Member k uses seed config.seed + k. Errors name the failing member.
Ensemble train_ensemble(const Corpus& corpus, const Split& split, const EmbeddingTable& table,
                        const training::TrainConfig& config, const EnsembleOptions& options);

EnsembleEstimate ensemble_estimate(const Ensemble& ensemble, const Sequence& seq_a,
                                   const Sequence& seq_b);

/// Distinct unordered pairs absent from corpus.pair_index(), uniform, seeded.
/// Throws ArgumentError stating the available count when too few exist.
std::vector<PairKey> sample_untested_pairs(const Corpus& corpus, std::size_t n_candidates,
                                           std::uint64_t seed);

struct QbcResult {
  std::vector<EnsembleEstimate> ranked;  // disagreement descending
  std::size_t n_flagged = 0;             // ceil(top_fraction * n_candidates) leading entries

  bool flagged(std::size_t rank) const { return rank < n_flagged; }
};

QbcResult qbc_search(const Ensemble& ensemble, const Corpus& corpus,
                     const std::vector<Sequence>& embedded, std::size_t n_candidates,
                     std::uint64_t seed, double top_fraction, std::size_t jobs = 1);

struct TrendResult {
  double pearson_r = 0.0;  // R(mean, disagreement)
  stats::MwuResult mwu;    // disagreement: mean <= Q1 (first sample) vs mean >= Q3
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Requires >= 8 estimates. Throws UndefinedStatisticError on zero variance.
TrendResult disagreement_trend(std::span<const EnsembleEstimate> estimates);

// Ensemble directory: "ensemble.txt" manifest plus one checkpoint per member.
void save_ensemble(const Ensemble& ensemble, const std::filesystem::path& dir);
Ensemble load_ensemble(const std::filesystem::path& dir);

/// Tab-separated report plus a (mean, disagreement) scatter file.
void write_qbc_report(const QbcResult& result, const Corpus& corpus,
                      const std::filesystem::path& report_path,
                      const std::filesystem::path& scatter_path);

}  // namespace corrnet::ensemble
