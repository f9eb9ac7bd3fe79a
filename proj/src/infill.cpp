#include "corrnet/infill.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "corrnet/errors.hpp"
#include "corrnet/training.hpp"

namespace corrnet::infill {

char to_char(CellKind kind) {
  switch (kind) {
    case CellKind::Reported: return 'R';
    case CellKind::Predicted: return 'P';
    case CellKind::Diagonal: return 'D';
  }
  return 'D';
}

CorrelationTable::CorrelationTable(std::vector<CorrelateId> order)
    : order_(std::move(order)), upper_(order_.size() * (order_.size() - (order_.empty() ? 0 : 1)) / 2) {}

std::size_t CorrelationTable::slot(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // row i of the strict upper triangle starts after sum_{k<i} (n - 1 - k) cells
  const std::size_t n = order_.size();
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

const Cell& CorrelationTable::cell(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw ArgumentError("table index out of range");
  if (i == j) return diagonal_;
  return upper_[slot(i, j)];
}

void CorrelationTable::set(std::size_t i, std::size_t j, Cell cell) {
  if (i >= size() || j >= size()) throw ArgumentError("table index out of range");
  if (i == j || cell.kind == CellKind::Diagonal) throw ArgumentError("diagonal cells are fixed");
  upper_[slot(i, j)] = cell;
}

std::size_t CorrelationTable::count(CellKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(upper_.begin(), upper_.end(), [kind](const Cell& c) { return c.kind == kind; }));
}

double CorrelationTable::infill_fraction() const {
  const std::size_t pairs = off_diagonal_pairs();
  if (pairs == 0) return 0.0;
  return static_cast<double>(count(CellKind::Predicted)) / static_cast<double>(pairs);
}

CorrelationTable build_table(const Corpus& corpus, const std::vector<std::string>& paper_ids,
                             const PairPredictor& predict) {
  if (paper_ids.empty()) throw ArgumentError("no papers selected");
  std::map<std::string, std::vector<std::size_t>> by_paper;
  for (std::size_t i = 0; i < corpus.findings().size(); ++i) {
    by_paper[corpus.findings()[i].paper_id].push_back(i);
  }

  std::vector<CorrelateId> order;
  std::set<CorrelateId> placed;
  std::map<PairKey, std::pair<double, std::size_t>> reported;
  std::set<std::string> selected;
  for (const auto& paper : paper_ids) {
    auto it = by_paper.find(paper);
    if (it == by_paper.end()) throw ArgumentError("unknown paper id '" + paper + "'");
    if (!selected.insert(paper).second) continue;
    for (std::size_t idx : it->second) {
      const Finding& f = corpus.findings()[idx];
      for (CorrelateId c : {f.correlate_a, f.correlate_b}) {
        if (placed.insert(c).second) order.push_back(c);
      }
      auto& acc = reported[PairKey::of(f.correlate_a, f.correlate_b)];
      acc.first += f.r;
      ++acc.second;
    }
  }
  if (order.size() < 2) throw ArgumentError("selected papers contribute fewer than 2 correlates");

  CorrelationTable table(order);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const PairKey key = PairKey::of(order[i], order[j]);
      if (auto it = reported.find(key); it != reported.end()) {
        table.set(i, j, {CellKind::Reported, it->second.first / static_cast<double>(it->second.second)});
      } else {
        table.set(i, j, {CellKind::Predicted, predict(key.lo, key.hi)});
      }
    }
  }
  return table;
}

CorrelationTable build_table(const Corpus& corpus, const std::vector<std::string>& paper_ids,
                             const neural::ModelParams& model, const EmbeddingTable& table,
                             OovPolicy oov) {
  const auto embedded = training::embed_correlates(corpus, table, oov);
  return build_table(corpus, paper_ids, [&](CorrelateId a, CorrelateId b) {
    return neural::predict_pair(embedded[a], embedded[b], model);
  });
}

CorrelationTable build_table(const Corpus& corpus, const std::vector<std::string>& paper_ids,
                             const ensemble::Ensemble& model, const EmbeddingTable& table,
                             OovPolicy oov) {
  const auto embedded = training::embed_correlates(corpus, table, oov);
  return build_table(corpus, paper_ids, [&](CorrelateId a, CorrelateId b) {
    return ensemble::ensemble_estimate(model, embedded[a], embedded[b]).mean;
  });
}

std::filesystem::path values_path(const std::filesystem::path& prefix) {
  return prefix.string() + ".values.tsv";
}

std::filesystem::path mask_path(const std::filesystem::path& prefix) {
  return prefix.string() + ".mask.tsv";
}

void export_table(const CorrelationTable& table, const Corpus& corpus,
                  const std::filesystem::path& prefix) {
  std::ofstream values(values_path(prefix));
  std::ofstream mask(mask_path(prefix));
  if (!values || !mask) throw IoError("cannot write table files with prefix " + prefix.string());

  const auto& order = table.correlate_order();
  for (std::ostream* out : {static_cast<std::ostream*>(&values), static_cast<std::ostream*>(&mask)}) {
    *out << "correlate";
    for (CorrelateId c : order) *out << '\t' << corpus.correlate(c).raw_text;
    *out << '\n';
  }
  char buf[64];
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::string& label = corpus.correlate(order[i]).raw_text;
    values << label;
    mask << label;
    for (std::size_t j = 0; j < order.size(); ++j) {
      const Cell& c = table.cell(i, j);
      if (c.kind == CellKind::Diagonal) {
        values << "\tNA";
      } else {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, c.value, std::chars_format::fixed, 6);
        (void)ec;
        values << '\t' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
      }
      mask << '\t' << to_char(c.kind);
    }
    values << '\n';
    mask << '\n';
  }
  if (!values || !mask) throw IoError("failed writing table files with prefix " + prefix.string());
}

namespace {

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

ExportedTable read_exported_table(const std::filesystem::path& prefix) {
  const auto value_rows = read_tsv(values_path(prefix));
  const auto mask_rows = read_tsv(mask_path(prefix));
  if (value_rows.empty() || value_rows.size() != mask_rows.size()) {
    throw FormatError(prefix.string(), 0, "value and mask files disagree in shape");
  }
  const std::size_t n = value_rows.size() - 1;
  ExportedTable out;
  out.labels.assign(value_rows[0].begin() + 1, value_rows[0].end());
  if (out.labels.size() != n) throw FormatError(values_path(prefix).string(), 1, "header width mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& vr = value_rows[i + 1];
    const auto& mr = mask_rows[i + 1];
    if (vr.size() != n + 1 || mr.size() != n + 1) {
      throw FormatError(prefix.string(), i + 2, "row width mismatch");
    }
    std::vector<double> values(n);
    std::vector<CellKind> kinds(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::string& m = mr[j + 1];
      if (m == "R") kinds[j] = CellKind::Reported;
      else if (m == "P") kinds[j] = CellKind::Predicted;
      else if (m == "D") kinds[j] = CellKind::Diagonal;
      else throw FormatError(mask_path(prefix).string(), i + 2, "bad mask symbol '" + m + "'");
      const std::string& v = vr[j + 1];
      if (v == "NA") {
        values[j] = std::numeric_limits<double>::quiet_NaN();
      } else {
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), values[j]);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
          throw FormatError(values_path(prefix).string(), i + 2, "bad value '" + v + "'");
        }
      }
    }
    out.values.push_back(std::move(values));
    out.mask.push_back(std::move(kinds));
  }
  return out;
}

}  // namespace corrnet::infill
