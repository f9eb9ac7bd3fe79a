#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "corrnet/corpus.hpp"
#include "corrnet/embeddings.hpp"
#include "corrnet/ensemble.hpp"
#include "corrnet/neural.hpp"

namespace corrnet::infill {

enum class CellKind { Reported, Predicted, Diagonal };

char to_char(CellKind kind);  // 'R', 'P', 'D'

struct Cell {
  CellKind kind = CellKind::Diagonal;
  double value = 0.0;  // unused for Diagonal

  bool operator==(const Cell&) const = default;
};

// Square table over the union of the selected papers' correlates, grouped by
// paper in the given order. Only the upper triangle is stored; cell(i, j) and
// cell(j, i) are the same object.
class CorrelationTable {
 public:
  CorrelationTable() = default;
  explicit CorrelationTable(std::vector<CorrelateId> order);

  std::size_t size() const { return order_.size(); }
  const std::vector<CorrelateId>& correlate_order() const { return order_; }

  const Cell& cell(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, Cell cell);  // off-diagonal only

  std::size_t count(CellKind kind) const;  // unordered off-diagonal pairs
  std::size_t off_diagonal_pairs() const { return size() * (size() - 1) / 2; }

  /// Predicted pairs / off-diagonal pairs (0 for a single-correlate table).
  double infill_fraction() const;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const;

  std::vector<CorrelateId> order_;
  std::vector<Cell> upper_;
  Cell diagonal_{CellKind::Diagonal, 0.0};
};

using PairPredictor = std::function<double(CorrelateId, CorrelateId)>;

// Reported cells hold the mean r of the selected papers' findings for that
// pair; every other off-diagonal cell is filled by `predict`. Throws
// ArgumentError for an unknown paper id or fewer than 2 correlates in total.
CorrelationTable build_table(const Corpus& corpus, const std::vector<std::string>& paper_ids,
                             const PairPredictor& predict);

CorrelationTable build_table(const Corpus& corpus, const std::vector<std::string>& paper_ids,
                             const neural::ModelParams& model, const EmbeddingTable& table,
                             OovPolicy oov = OovPolicy::Mean);

/// Cells take the ensemble mean.
CorrelationTable build_table(const Corpus& corpus, const std::vector<std::string>& paper_ids,
                             const ensemble::Ensemble& model, const EmbeddingTable& table,
                             OovPolicy oov = OovPolicy::Mean);

// `<prefix>.values.tsv`: header row and column of correlate texts, values with
// 6 decimals, "NA" on the diagonal. `<prefix>.mask.tsv`: same layout with
// R / P / D.
void export_table(const CorrelationTable& table, const Corpus& corpus,
                  const std::filesystem::path& prefix);

struct ExportedTable {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;  // NaN on the diagonal
  std::vector<std::vector<CellKind>> mask;
};

ExportedTable read_exported_table(const std::filesystem::path& prefix);

std::filesystem::path values_path(const std::filesystem::path& prefix);
std::filesystem::path mask_path(const std::filesystem::path& prefix);

}  // namespace corrnet::infill
