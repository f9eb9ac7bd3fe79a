#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "corrnet/textnorm.hpp"

namespace corrnet {

using Vector = std::vector<double>;
using Sequence = std::vector<Vector>;

enum class OovPolicy { Mean, Zero, Drop };

OovPolicy parse_oov_policy(const std::string& name);
std::string to_string(OovPolicy policy);

/// Frozen token -> vector map. Immutable once built.
class EmbeddingTable {
 public:
  /// Throws ArgumentError if `vectors` is empty or lengths disagree.
  explicit EmbeddingTable(std::unordered_map<std::string, Vector> vectors);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  const Vector& mean_vector() const { return mean_; }

  const Vector* find(const std::string& token) const;
  bool contains(const std::string& token) const { return find(token) != nullptr; }

  /// Tokens in lexicographic order.
  std::vector<std::string> tokens() const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Vector> vectors_;
  Vector mean_;
};

// Reads the common pretrained-vector text format: an optional "<count> <dim>"
// header line followed by "<token> v1 ... vd" lines. A "/c/en/" prefix on tokens
// is stripped. When `vocab_filter` is given only those tokens are kept. The
// first occurrence of a repeated token wins.
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::optional<std::unordered_set<std::string>>& vocab_filter =
                                   std::nullopt);

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

/// Never returns an empty sequence. Under Drop, an all-OOV input becomes a
/// single mean vector.
Sequence embed_sequence(const TokenList& tokens, const EmbeddingTable& table,
                        OovPolicy oov = OovPolicy::Mean);

}  // namespace corrnet
