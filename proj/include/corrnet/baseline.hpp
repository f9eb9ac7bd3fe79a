#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <unordered_map>

#include "corrnet/corpus.hpp"

namespace corrnet::baseline {

enum class Pooling {
  Pooled,       // mean over the union of findings containing either correlate
  EqualWeight,  // average of the two per-correlate means
};

struct Accumulator {
  double sum = 0.0;
  std::size_t count = 0;

  double mean() const { return sum / static_cast<double>(count); }
};

// Mean-value predictor: the average reported r over training findings that
// contain either correlate of the queried pair.
struct BaselineModel {
  std::unordered_map<CorrelateId, Accumulator> per_correlate;
  std::map<PairKey, Accumulator> per_pair;  // findings containing both, counted once in the union
  double global_mean = 0.0;
  Pooling pooling = Pooling::Pooled;
};

/// Throws ArgumentError when `train_indices` is empty.
BaselineModel fit_baseline(const Corpus& corpus, std::span<const std::size_t> train_indices,
                           Pooling pooling = Pooling::Pooled);

/// Falls back to the global mean when neither correlate was seen in training.
double baseline_predict(const BaselineModel& model, CorrelateId c_i, CorrelateId c_j);

}  // namespace corrnet::baseline
