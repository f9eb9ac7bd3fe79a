#include "corrnet/baseline.hpp"

#include "corrnet/errors.hpp"

namespace corrnet::baseline {

BaselineModel fit_baseline(const Corpus& corpus, std::span<const std::size_t> train_indices,
                           Pooling pooling) {
  if (train_indices.empty()) throw ArgumentError("baseline needs a non-empty training set");
  BaselineModel model;
  model.pooling = pooling;
  double total = 0.0;
  for (std::size_t idx : train_indices) {
    const Finding& f = corpus.findings().at(idx);
    for (CorrelateId c : {f.correlate_a, f.correlate_b}) {
      auto& acc = model.per_correlate[c];
      acc.sum += f.r;
      ++acc.count;
    }
    auto& pair = model.per_pair[PairKey::of(f.correlate_a, f.correlate_b)];
    pair.sum += f.r;
    ++pair.count;
    total += f.r;
  }
  model.global_mean = total / static_cast<double>(train_indices.size());
  return model;
}

double baseline_predict(const BaselineModel& model, CorrelateId c_i, CorrelateId c_j) {
  const auto it_i = model.per_correlate.find(c_i);
  const auto it_j = model.per_correlate.find(c_j);
  const bool seen_i = it_i != model.per_correlate.end();
  const bool seen_j = it_j != model.per_correlate.end();
  if (!seen_i && !seen_j) return model.global_mean;
  if (!seen_j || c_i == c_j) return it_i->second.mean();
  if (!seen_i) return it_j->second.mean();

  if (model.pooling == Pooling::EqualWeight) {
    return 0.5 * (it_i->second.mean() + it_j->second.mean());
  }
  double sum = it_i->second.sum + it_j->second.sum;
  std::size_t count = it_i->second.count + it_j->second.count;
  if (auto both = model.per_pair.find(PairKey::of(c_i, c_j)); both != model.per_pair.end()) {
    sum -= both->second.sum;
    count -= both->second.count;
  }
  return sum / static_cast<double>(count);
}

}  // namespace corrnet::baseline
