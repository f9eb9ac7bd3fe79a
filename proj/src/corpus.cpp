#include "corrnet/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "corrnet/errors.hpp"
#include "corrnet/random.hpp"

namespace corrnet {

CorrelateId Corpus::add_correlate(std::string raw_text, TokenList tokens) {
  if (tokens.empty()) throw ArgumentError("correlate '" + raw_text + "' has no tokens");
  if (auto it = by_tokens_.find(tokens); it != by_tokens_.end()) return it->second;
  const auto id = static_cast<CorrelateId>(correlates_.size());
  by_tokens_.emplace(tokens, id);
  correlates_.push_back({id, std::move(raw_text), std::move(tokens)});
  return id;
}

std::size_t Corpus::add_finding(Finding finding) {
  if (!(finding.r >= -1.0 && finding.r <= 1.0)) {
    throw ArgumentError("correlation " + std::to_string(finding.r) + " outside [-1, 1]");
  }
  if (finding.correlate_a >= correlates_.size() || finding.correlate_b >= correlates_.size()) {
    throw ArgumentError("finding references an unknown correlate id");
  }
  if (finding.correlate_a == finding.correlate_b) {
    throw ArgumentError("finding pairs correlate '" + correlates_[finding.correlate_a].raw_text +
                        "' with itself");
  }
  const std::size_t index = findings_.size();
  pair_index_[PairKey::of(finding.correlate_a, finding.correlate_b)].push_back(index);
  findings_.push_back(std::move(finding));
  return index;
}

std::vector<std::string> Corpus::paper_ids() const {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& f : findings_) {
    if (seen.insert(f.paper_id).second) ids.push_back(f.paper_id);
  }
  return ids;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, const NormalizationConfig& normalizer) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open findings file " + path.string());
  const std::string source = path.string();

  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || blank(line)) continue;

    const auto fields = split_tabs(line);
    if (fields.size() != 5) {
      throw FormatError(source, line_no,
                        "expected 5 tab-separated fields, found " + std::to_string(fields.size()));
    }

    int year = 0;
    {
      auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), year);
      if (ec != std::errc() || ptr != fields[1].data() + fields[1].size()) {
        throw FormatError(source, line_no, "unparseable year '" + std::string(fields[1]) + "'");
      }
    }
    double r = 0.0;
    {
      auto [ptr, ec] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), r,
                                       std::chars_format::fixed);
      if (ec != std::errc() || ptr != fields[4].data() + fields[4].size()) {
        throw FormatError(source, line_no, "unparseable correlation '" + std::string(fields[4]) + "'");
      }
    }
    if (!(r >= -1.0 && r <= 1.0)) {
      throw FormatError(source, line_no, "correlation " + std::string(fields[4]) + " outside [-1, 1]");
    }

    std::string text_a(fields[2]);
    std::string text_b(fields[3]);
    TokenList tokens_a = normalize(text_a, normalizer);
    TokenList tokens_b = normalize(text_b, normalizer);
    if (tokens_a.empty() || tokens_b.empty()) {
      throw FormatError(source, line_no, "correlate description normalizes to no tokens");
    }
    if (tokens_a == tokens_b) {
      throw FormatError(source, line_no, "both correlates normalize to the same description");
    }
    const CorrelateId a = corpus.add_correlate(std::move(text_a), std::move(tokens_a));
    const CorrelateId b = corpus.add_correlate(std::move(text_b), std::move(tokens_b));
    corpus.add_finding({a, b, r, std::string(fields[0]), year});
  }
  if (corpus.findings().empty()) throw FormatError(source, 0, "empty corpus: no findings");
  return corpus;
}

std::string format_r(double r) {
  double rounded = std::round(r * 1e6) / 1e6;
  if (rounded == 0.0) rounded = 0.0;  // drop negative zero
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, rounded, std::chars_format::fixed);
  (void)ec;
  return std::string(buf, ptr);
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write findings file " + path.string());
  out << "# paper_id\tyear\tcorrelate_a\tcorrelate_b\tr\n";
  for (const auto& f : corpus.findings()) {
    out << f.paper_id << '\t' << f.year << '\t' << corpus.correlate(f.correlate_a).raw_text << '\t'
        << corpus.correlate(f.correlate_b).raw_text << '\t' << format_r(f.r) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::unordered_map<std::string, PaperInfo> load_paper_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open paper sidecar " + path.string());
  std::unordered_map<std::string, PaperInfo> papers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2) throw FormatError(path.string(), line_no, "expected paper_id, year[, title]");
    PaperInfo info;
    auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), info.year);
    if (ec != std::errc() || ptr != fields[1].data() + fields[1].size()) {
      throw FormatError(path.string(), line_no, "unparseable year");
    }
    if (fields.size() > 2) info.title = std::string(fields[2]);
    papers.emplace(std::string(fields[0]), std::move(info));
  }
  return papers;
}

Split split_corpus(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ArgumentError("train fraction must lie in (0, 1)");
  }
  const std::size_t n = corpus.findings().size();
  if (n < 2) throw ArgumentError("split needs at least 2 findings");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 0.5));
  Split split;
  split.seed = seed;
  split.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

double untested_fraction(std::size_t n_correlates, std::size_t n_tested_pairs) {
  if (n_correlates < 2) throw UndefinedStatisticError("untested fraction needs at least 2 correlates");
  const double n = static_cast<double>(n_correlates);
  const double all_pairs = n * (n - 1.0) / 2.0;
  if (static_cast<double>(n_tested_pairs) > all_pairs) {
    throw ArgumentError("more tested pairs than possible pairs");
  }
  return 1.0 - static_cast<double>(n_tested_pairs) / all_pairs;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats s;
  s.n_correlates = corpus.correlates().size();
  s.n_findings = corpus.findings().size();
  s.n_papers = corpus.paper_ids().size();
  s.n_tested_pairs = corpus.pair_index().size();
  s.untested_fraction = untested_fraction(s.n_correlates, s.n_tested_pairs);
  return s;
}

}  // namespace corrnet
