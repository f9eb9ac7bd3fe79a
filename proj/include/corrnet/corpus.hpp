#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "corrnet/textnorm.hpp"

namespace corrnet {

using CorrelateId = std::uint32_t;

struct Correlate {
  CorrelateId id = 0;
  std::string raw_text;  // first description seen for this token sequence
  TokenList tokens;

  bool operator==(const Correlate&) const = default;
};

struct Finding {
  CorrelateId correlate_a = 0;
  CorrelateId correlate_b = 0;
  double r = 0.0;
  std::string paper_id;
  int year = 0;

  bool operator==(const Finding&) const = default;
};

/// Unordered correlate pair, stored with lo < hi.
struct PairKey {
  CorrelateId lo = 0;
  CorrelateId hi = 0;

  static PairKey of(CorrelateId a, CorrelateId b) { return a < b ? PairKey{a, b} : PairKey{b, a}; }
  auto operator<=>(const PairKey&) const = default;
};

// Correlates and findings. Correlate identity is the normalized token sequence:
// two descriptions that normalize identically share one id. Ids are dense and
// assigned in order of first appearance.
class Corpus {
 public:
  /// Returns the existing id when `tokens` is already known. Throws
  /// ArgumentError on an empty token list.
  CorrelateId add_correlate(std::string raw_text, TokenList tokens);

  /// Validates range and identity rules and updates the pair index.
  std::size_t add_finding(Finding finding);

  const std::vector<Correlate>& correlates() const { return correlates_; }
  const std::vector<Finding>& findings() const { return findings_; }
  const Correlate& correlate(CorrelateId id) const { return correlates_.at(id); }
  const std::map<PairKey, std::vector<std::size_t>>& pair_index() const { return pair_index_; }

  bool is_tested(CorrelateId a, CorrelateId b) const {
    return pair_index_.contains(PairKey::of(a, b));
  }

  /// Paper ids in order of first appearance.
  std::vector<std::string> paper_ids() const;

  bool operator==(const Corpus& other) const {
    return correlates_ == other.correlates_ && findings_ == other.findings_;
  }

 private:
  std::vector<Correlate> correlates_;
  std::vector<Finding> findings_;
  std::map<TokenList, CorrelateId> by_tokens_;
  std::map<PairKey, std::vector<std::size_t>> pair_index_;
};

// Findings file: UTF-8, one finding per line, tab-separated
//   paper_id  year  correlate_a_text  correlate_b_text  r
// '#' lines and blank lines are skipped. Throws FormatError naming the line on
// malformed rows, out-of-range r, empty-token correlates and self-pairs, and
// on a file without findings.
Corpus load_corpus(const std::filesystem::path& path, const NormalizationConfig& normalizer = {});

/// Writes r rounded to 6 fractional digits in shortest fixed notation.
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::string format_r(double r);

struct PaperInfo {
  int year = 0;
  std::string title;
};

/// Optional sidecar: tab-separated paper_id, year, title.
std::unordered_map<std::string, PaperInfo> load_paper_sidecar(const std::filesystem::path& path);

struct Split {
  std::vector<std::size_t> train_indices;  // ascending
  std::vector<std::size_t> test_indices;   // ascending
  std::uint64_t seed = 0;

  bool operator==(const Split&) const = default;
};

/// Random partition by finding; |train| = floor(train_fraction * n + 0.5).
Split split_corpus(const Corpus& corpus, double train_fraction = 0.8, std::uint64_t seed = 0);

struct CorpusStats {
  std::size_t n_correlates = 0;
  std::size_t n_findings = 0;
  std::size_t n_papers = 0;
  std::size_t n_tested_pairs = 0;
  double untested_fraction = 0.0;
};

/// 1 - tested / C(n, 2). Throws UndefinedStatisticError when n < 2.
double untested_fraction(std::size_t n_correlates, std::size_t n_tested_pairs);

CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace corrnet
