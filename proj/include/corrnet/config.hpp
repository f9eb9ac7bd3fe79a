#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "corrnet/baseline.hpp"
#include "corrnet/embeddings.hpp"
#include "corrnet/textnorm.hpp"
#include "corrnet/training.hpp"

namespace corrnet {

// Settings shared by every subcommand. Precedence: built-in defaults, then the
// config file, then command-line flags.
struct GlobalConfig {
  NormalizationConfig normalization;
  std::string embeddings;  // vector file path
  OovPolicy oov = OovPolicy::Mean;

  training::TrainConfig train;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;

  std::size_t members = 50;
  bool bagging = true;
  std::size_t candidates = 5000;
  double top_fraction = 0.01;
  std::size_t jobs = 0;  // 0 = available cores

  baseline::Pooling baseline_pooling = baseline::Pooling::Pooled;

  /// Train config with seed and OOV policy taken from the shared fields.
  training::TrainConfig train_config() const;
};

/// Throws ArgumentError for an unknown key or an unparseable value.
void apply_config_value(GlobalConfig& config, const std::string& key, const std::string& value);

// Flat text: one "key = value" per line, '#' comments, blank lines ignored.
// Keys are the field names above (e.g. "hidden_size", "learning_rate",
// "lowercase"). Throws FormatError naming the line on bad input.
void apply_config_file(GlobalConfig& config, const std::filesystem::path& path);

/// Every key with its current value, in file syntax.
std::string dump_config(const GlobalConfig& config);

}  // namespace corrnet
