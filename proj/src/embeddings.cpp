#include "corrnet/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "corrnet/errors.hpp"

namespace corrnet {

OovPolicy parse_oov_policy(const std::string& name) {
  if (name == "mean") return OovPolicy::Mean;
  if (name == "zero") return OovPolicy::Zero;
  if (name == "drop") return OovPolicy::Drop;
  throw ArgumentError("unknown OOV policy '" + name + "' (expected mean, zero or drop)");
}

std::string to_string(OovPolicy policy) {
  switch (policy) {
    case OovPolicy::Mean: return "mean";
    case OovPolicy::Zero: return "zero";
    case OovPolicy::Drop: return "drop";
  }
  return "mean";
}

EmbeddingTable::EmbeddingTable(std::unordered_map<std::string, Vector> vectors)
    : vectors_(std::move(vectors)) {
  if (vectors_.empty()) throw ArgumentError("embedding table is empty");
  dim_ = vectors_.begin()->second.size();
  if (dim_ == 0) throw ArgumentError("embedding vectors have zero length");
  mean_.assign(dim_, 0.0);
  // Sum in token order so the mean does not depend on hash iteration order.
  for (const auto& token : tokens()) {
    const Vector& v = vectors_.at(token);
    if (v.size() != dim_) throw ArgumentError("embedding '" + token + "' has inconsistent length");
    for (std::size_t k = 0; k < dim_; ++k) mean_[k] += v[k];
  }
  for (double& m : mean_) m /= static_cast<double>(vectors_.size());
}

const Vector* EmbeddingTable::find(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<std::string> EmbeddingTable::tokens() const {
  std::vector<std::string> out;
  out.reserve(vectors_.size());
  for (const auto& [token, _] : vectors_) out.push_back(token);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool is_integer(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::optional<std::unordered_set<std::string>>& vocab_filter) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file " + path.string());
  const std::string source = path.string();

  std::unordered_map<std::string, Vector> vectors;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  bool saw_data = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (!saw_data && line_no == 1 && fields.size() == 2 && is_integer(fields[0]) &&
        is_integer(fields[1])) {
      continue;  // "<count> <dim>" header
    }
    if (fields.size() < 2) throw FormatError(source, line_no, "expected a token followed by values");
    const std::size_t line_dim = fields.size() - 1;
    if (!saw_data) {
      dim = line_dim;
      saw_data = true;
    } else if (line_dim != dim) {
      std::ostringstream msg;
      msg << "vector length " << line_dim << " differs from " << dim;
      throw FormatError(source, line_no, msg.str());
    }

    std::string token(fields[0]);
    if (token.rfind("/c/en/", 0) == 0) token.erase(0, 6);
    if (vocab_filter && !vocab_filter->contains(token)) continue;
    if (vectors.contains(token)) continue;

    Vector v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_double(fields[k + 1], v[k])) {
        throw FormatError(source, line_no, "unparseable value '" + std::string(fields[k + 1]) + "'");
      }
    }
    vectors.emplace(std::move(token), std::move(v));
  }
  if (!saw_data) throw FormatError(source, 0, "embedding file contains no vectors");
  if (vectors.empty()) throw FormatError(source, 0, "no embedding matched the vocabulary filter");
  return EmbeddingTable(std::move(vectors));
}

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write embedding file " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  out.precision(17);
  for (const auto& token : table.tokens()) {
    out << token;
    for (double v : *table.find(token)) out << ' ' << v;
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Sequence embed_sequence(const TokenList& tokens, const EmbeddingTable& table, OovPolicy oov) {
  Sequence seq;
  seq.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (const Vector* v = table.find(token)) {
      seq.push_back(*v);
      continue;
    }
    switch (oov) {
      case OovPolicy::Mean: seq.push_back(table.mean_vector()); break;
      case OovPolicy::Zero: seq.emplace_back(table.dim(), 0.0); break;
      case OovPolicy::Drop: break;
    }
  }
  if (seq.empty()) seq.push_back(table.mean_vector());
  return seq;
}

}  // namespace corrnet
