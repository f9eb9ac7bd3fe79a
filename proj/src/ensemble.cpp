#include "corrnet/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "corrnet/checkpoint.hpp"
#include "corrnet/errors.hpp"
#include "corrnet/parallel.hpp"
#include "corrnet/random.hpp"

namespace corrnet::ensemble {

double ci_half_width(double disagreement, std::size_t n_members) {
  if (n_members == 0) throw ArgumentError("ensemble has no members");
  return 1.96 * disagreement / std::sqrt(static_cast<double>(n_members));
}

EnsembleEstimate summarize_predictions(std::span<const double> predictions, PairKey pair) {
  if (predictions.size() < 2) throw ArgumentError("ensemble estimate needs at least 2 members");
  EnsembleEstimate e;
  e.pair = pair;
  e.mean = stats::mean(predictions);
  e.disagreement = stats::sample_sd(predictions);
  e.ci_half_width = ci_half_width(e.disagreement, predictions.size());
  return e;
}

training::TrainResult train_member(const Corpus& corpus, const Split& split,
                                   const std::vector<Sequence>& embedded,
                                   const training::TrainConfig& config, std::uint64_t member_seed,
                                   bool bagging) {
  training::TrainConfig member_config = config;
  member_config.seed = member_seed;
  auto [fit, validation] =
      training::carve_validation(split.train_indices, config.validation_fraction, member_seed);
  if (bagging) {
    Rng rng(derive_seed(member_seed, 0xB0075));
    std::vector<std::size_t> resample(fit.size());
    for (auto& idx : resample) idx = fit[rng.below(fit.size())];
    fit = std::move(resample);
  }
  return training::train_on(corpus, embedded, fit, validation, {}, member_config);
}

Ensemble train_ensemble(const Corpus& corpus, const Split& split, const EmbeddingTable& table,
                        const training::TrainConfig& config, const EnsembleOptions& options) {
  if (options.members < 2) throw ArgumentError("an ensemble needs at least 2 members");
  config.validate();
  if (split.train_indices.empty()) throw ArgumentError("training set is empty");
  for (std::size_t idx : split.train_indices) {
    if (idx >= corpus.findings().size()) throw ArgumentError("split index out of range");
  }
  const auto embedded = training::embed_correlates(corpus, table, config.oov);

  Ensemble ensemble;
  ensemble.bagging = options.bagging;
  ensemble.members.resize(options.members);
  for (std::size_t k = 0; k < options.members; ++k) ensemble.member_seeds.push_back(config.seed + k);

  parallel_for(options.members, options.jobs, [&](std::size_t k) {
    try {
      ensemble.members[k] =
          train_member(corpus, split, embedded, config, ensemble.member_seeds[k], options.bagging).params;
    } catch (const std::exception& e) {
      throw Error("ensemble member " + std::to_string(k) + ": " + e.what());
    }
  });
  return ensemble;
}

EnsembleEstimate ensemble_estimate(const Ensemble& ensemble, const Sequence& seq_a,
                                   const Sequence& seq_b) {
  std::vector<double> predictions;
  predictions.reserve(ensemble.size());
  for (const auto& member : ensemble.members) {
    predictions.push_back(neural::predict_pair(seq_a, seq_b, member));
  }
  return summarize_predictions(predictions);
}

std::vector<PairKey> sample_untested_pairs(const Corpus& corpus, std::size_t n_candidates,
                                           std::uint64_t seed) {
  const std::size_t n = corpus.correlates().size();
  if (n < 2) throw ArgumentError("candidate search needs at least 2 correlates");
  const std::size_t all_pairs = n * (n - 1) / 2;
  const std::size_t untested = all_pairs - corpus.pair_index().size();
  if (untested < n_candidates) {
    throw ArgumentError("requested " + std::to_string(n_candidates) +
                        " candidate pairs but only " + std::to_string(untested) +
                        " untested pairs are available");
  }

  Rng rng(seed);
  std::vector<PairKey> chosen;
  chosen.reserve(n_candidates);
  if (2 * n_candidates > untested) {
    // Dense request: partial Fisher-Yates over the full untested list.
    std::vector<PairKey> pool;
    pool.reserve(untested);
    for (CorrelateId a = 0; a < n; ++a) {
      for (CorrelateId b = a + 1; b < n; ++b) {
        if (!corpus.is_tested(a, b)) pool.push_back({a, b});
      }
    }
    for (std::size_t i = 0; i < n_candidates; ++i) {
      std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
      chosen.push_back(pool[i]);
    }
    return chosen;
  }

  std::set<PairKey> seen;
  while (chosen.size() < n_candidates) {
    const auto a = static_cast<CorrelateId>(rng.below(n));
    const auto b = static_cast<CorrelateId>(rng.below(n));
    if (a == b) continue;
    const PairKey key = PairKey::of(a, b);
    if (corpus.is_tested(key.lo, key.hi) || !seen.insert(key).second) continue;
    chosen.push_back(key);
  }
  return chosen;
}

QbcResult qbc_search(const Ensemble& ensemble, const Corpus& corpus,
                     const std::vector<Sequence>& embedded, std::size_t n_candidates,
                     std::uint64_t seed, double top_fraction, std::size_t jobs) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
    throw ArgumentError("top fraction must lie in (0, 1]");
  }
  if (ensemble.size() < 2) throw ArgumentError("an ensemble needs at least 2 members");
  const auto pairs = sample_untested_pairs(corpus, n_candidates, seed);

  QbcResult result;
  result.ranked.resize(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    result.ranked[i] = ensemble_estimate(ensemble, embedded[pairs[i].lo], embedded[pairs[i].hi]);
    result.ranked[i].pair = pairs[i];
  });
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const EnsembleEstimate& l, const EnsembleEstimate& r) {
                     if (l.disagreement != r.disagreement) return l.disagreement > r.disagreement;
                     return l.pair < r.pair;
                   });
  result.n_flagged = std::min(
      pairs.size(),
      static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(n_candidates) - 1e-9)));
  return result;
}

TrendResult disagreement_trend(std::span<const EnsembleEstimate> estimates) {
  if (estimates.size() < 8) throw ArgumentError("trend analysis needs at least 8 estimates");
  std::vector<double> means, sds;
  for (const auto& e : estimates) {
    means.push_back(e.mean);
    sds.push_back(e.disagreement);
  }
  TrendResult out;
  out.pearson_r = stats::pearson(means, sds);
  std::tie(out.q1, out.q3) = stats::quartiles(means);
  std::vector<double> low, high;
  for (const auto& e : estimates) {
    if (e.mean <= out.q1) low.push_back(e.disagreement);
    if (e.mean >= out.q3) high.push_back(e.disagreement);
  }
  out.mwu = stats::mann_whitney_u(low, high);
  return out;
}

void save_ensemble(const Ensemble& ensemble, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create ensemble directory " + dir.string() + ": " + ec.message());
  std::ofstream manifest(dir / "ensemble.txt");
  if (!manifest) throw IoError("cannot write ensemble manifest in " + dir.string());
  manifest << "corrnet-ensemble 1\n";
  manifest << "bagging " << (ensemble.bagging ? 1 : 0) << '\n';
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    std::ostringstream name;
    name << "member_" << std::setw(3) << std::setfill('0') << k << ".ckpt";
    save_checkpoint(ensemble.members[k], dir / name.str());
    manifest << "member " << ensemble.member_seeds[k] << ' ' << name.str() << '\n';
  }
  if (!manifest) throw IoError("failed writing ensemble manifest");
}

Ensemble load_ensemble(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "ensemble.txt";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open ensemble manifest " + manifest_path.string());
  Ensemble ensemble;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    if (line_no == 1) {
      int version = 0;
      ls >> version;
      if (key != "corrnet-ensemble" || version != 1) {
        throw FormatError(manifest_path.string(), line_no, "not a corrnet ensemble manifest");
      }
    } else if (key == "bagging") {
      int flag = 0;
      ls >> flag;
      ensemble.bagging = flag != 0;
    } else if (key == "member") {
      std::uint64_t seed = 0;
      std::string file;
      if (!(ls >> seed >> file)) throw FormatError(manifest_path.string(), line_no, "bad member line");
      ensemble.member_seeds.push_back(seed);
      ensemble.members.push_back(load_checkpoint(dir / file));
    } else {
      throw FormatError(manifest_path.string(), line_no, "unknown manifest key '" + key + "'");
    }
  }
  if (ensemble.size() < 2) throw FormatError(manifest_path.string(), 0, "ensemble has fewer than 2 members");
  return ensemble;
}

void write_qbc_report(const QbcResult& result, const Corpus& corpus,
                      const std::filesystem::path& report_path,
                      const std::filesystem::path& scatter_path) {
  std::ofstream report(report_path);
  if (!report) throw IoError("cannot write report " + report_path.string());
  std::ofstream scatter(scatter_path);
  if (!scatter) throw IoError("cannot write scatter file " + scatter_path.string());
  report << "correlate_a\tcorrelate_b\tmean\tdisagreement\tci_half_width\tflagged\n";
  scatter << "mean\tdisagreement\n";
  report << std::fixed << std::setprecision(8);
  scatter << std::fixed << std::setprecision(8);
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    const auto& e = result.ranked[i];
    report << corpus.correlate(e.pair.lo).raw_text << '\t' << corpus.correlate(e.pair.hi).raw_text
           << '\t' << e.mean << '\t' << e.disagreement << '\t' << e.ci_half_width << '\t'
           << (result.flagged(i) ? 1 : 0) << '\n';
    scatter << e.mean << '\t' << e.disagreement << '\n';
  }
  if (!report || !scatter) throw IoError("failed writing QbC output");
}

}  // namespace corrnet::ensemble
