#include "corrnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "corrnet/errors.hpp"
#include "corrnet/random.hpp"

namespace corrnet {

double synthetic_truth(const Vector& a, const Vector& b, double gain) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::tanh(gain * dot / std::sqrt(na * nb));
}

namespace {

double quantize(double r) {
  const double q = std::round(r * 1e6) / 1e6;
  return q == 0.0 ? 0.0 : q;
}

}  // namespace

SyntheticCorpus generate_synthetic(const EmbeddingTable& vocab, const SyntheticOptions& options) {
  const std::size_t n = options.n_correlates;
  if (n < 2) throw ArgumentError("synthetic corpus needs at least 2 correlates");
  const std::size_t all_pairs = n * (n - 1) / 2;
  if (options.n_findings > all_pairs) {
    throw ArgumentError("requested " + std::to_string(options.n_findings) + " findings but only " +
                        std::to_string(all_pairs) + " correlate pairs exist");
  }
  if (options.min_tokens < 1 || options.min_tokens > options.max_tokens) {
    throw ArgumentError("invalid synthetic token-length range");
  }
  if (options.correlates_per_paper < 2) throw ArgumentError("papers need at least 2 correlates");

  // Only tokens that survive normalization unchanged, so reloading a written
  // corpus reproduces the same token sequences.
  std::vector<std::string> words;
  for (const auto& token : vocab.tokens()) {
    const auto norm = normalize(token);
    if (norm.size() == 1 && norm[0] == token) words.push_back(token);
  }
  if (words.empty()) throw ArgumentError("vocabulary has no normalization-stable tokens");

  Rng rng(options.seed);
  SyntheticCorpus out;
  out.gain = options.gain;

  std::vector<std::pair<std::string, TokenList>> descriptions;
  std::vector<Vector> latents;
  std::set<TokenList> used;
  const std::size_t span = options.max_tokens - options.min_tokens + 1;
  for (std::size_t c = 0; c < n; ++c) {
    TokenList tokens;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000) throw ArgumentError("vocabulary too small for distinct correlates");
      const std::size_t len = options.min_tokens + rng.below(span);
      tokens.clear();
      for (std::size_t t = 0; t < len; ++t) tokens.push_back(words[rng.below(words.size())]);
      if (used.insert(tokens).second) break;
    }
    Vector latent(vocab.dim(), 0.0);
    for (const auto& t : tokens) {
      const Vector& v = *vocab.find(t);
      for (std::size_t k = 0; k < latent.size(); ++k) latent[k] += v[k];
    }
    for (double& x : latent) x /= static_cast<double>(tokens.size());
    descriptions.emplace_back(join_tokens(tokens), std::move(tokens));
    latents.push_back(std::move(latent));
  }

  // Papers draw first from a shuffled queue of not-yet-used correlates so that
  // every correlate appears once there are enough findings.
  std::vector<CorrelateId> uncovered(n);
  for (std::size_t c = 0; c < n; ++c) uncovered[c] = static_cast<CorrelateId>(c);
  rng.shuffle(std::span<CorrelateId>(uncovered));
  std::size_t next_uncovered = 0;

  std::set<PairKey> taken;
  std::vector<std::vector<PairKey>> papers;
  const std::size_t k = std::min(options.correlates_per_paper, n);
  int stalls = 0;
  while (taken.size() < options.n_findings && stalls < 50) {
    std::vector<CorrelateId> members;
    while (members.size() < k) {
      const auto c = next_uncovered < n ? uncovered[next_uncovered++]
                                        : static_cast<CorrelateId>(rng.below(n));
      if (std::find(members.begin(), members.end(), c) == members.end()) members.push_back(c);
    }
    std::vector<PairKey> reported;
    for (std::size_t i = 0; i < k && taken.size() < options.n_findings; ++i) {
      for (std::size_t j = i + 1; j < k && taken.size() < options.n_findings; ++j) {
        const PairKey key = PairKey::of(members[i], members[j]);
        if (taken.insert(key).second) reported.push_back(key);
      }
    }
    if (reported.empty()) {
      ++stalls;
    } else {
      stalls = 0;
      papers.push_back(std::move(reported));
    }
  }
  if (taken.size() < options.n_findings) {
    // Dense request: finish from the remaining pairs directly.
    std::vector<PairKey> remaining;
    for (CorrelateId a = 0; a < n; ++a) {
      for (CorrelateId b = a + 1; b < n; ++b) {
        if (!taken.contains({a, b})) remaining.push_back({a, b});
      }
    }
    rng.shuffle(std::span<PairKey>(remaining));
    remaining.resize(options.n_findings - taken.size());
    for (std::size_t i = 0; i < remaining.size(); i += 10) {
      const auto end = std::min(remaining.size(), i + 10);
      papers.emplace_back(remaining.begin() + static_cast<std::ptrdiff_t>(i),
                          remaining.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }

  // Ids follow first appearance in the findings, exactly as load_corpus assigns
  // them, so a written corpus reloads to an equal one. Correlates that ended up
  // in no finding are dropped.
  auto intern = [&](CorrelateId generated) {
    const auto& [raw, tokens] = descriptions[generated];
    const CorrelateId id = out.corpus.add_correlate(raw, tokens);
    if (id == out.latents.size()) out.latents.push_back(latents[generated]);
    return id;
  };
  for (std::size_t p = 0; p < papers.size(); ++p) {
    const std::string paper_id = "syn" + std::to_string(p + 1);
    const int year = 1990 + static_cast<int>(p % 30);
    for (const PairKey& key : papers[p]) {
      const double clean = synthetic_truth(latents[key.lo], latents[key.hi], options.gain);
      const double noisy = options.noise_sd > 0.0 ? clean + options.noise_sd * rng.normal() : clean;
      const CorrelateId a = intern(key.lo);
      const CorrelateId b = intern(key.hi);
      out.corpus.add_finding({a, b, quantize(std::clamp(noisy, -1.0, 1.0)), paper_id, year});
      out.clean_r.push_back(clean);
    }
  }
  return out;
}

}  // namespace corrnet
