#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace corrnet {

struct NormalizationConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  std::size_t max_tokens = 32;
};

using TokenList = std::vector<std::string>;

// Converts a correlate description into an ordered token list:
//   1. Unicode canonical composition (NFC)
//   2. optional lowercasing (root locale)
//   3. optional punctuation -> space, except hyphens and apostrophes that sit
//      between two letters or digits
//   4. split on whitespace runs, truncate to max_tokens
//
// Invalid UTF-8 input is decoded with replacement characters. An empty result
// is valid; callers decide whether to reject it. Throws ArgumentError when
// max_tokens is 0.
TokenList normalize(std::string_view raw, const NormalizationConfig& config = {});

std::string join_tokens(const TokenList& tokens, char sep = ' ');

}  // namespace corrnet
