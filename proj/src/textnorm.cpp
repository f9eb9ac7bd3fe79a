#include "corrnet/textnorm.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "corrnet/errors.hpp"

namespace corrnet {
namespace {

icu::UnicodeString to_nfc(const icu::UnicodeString& text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString out = nfc->normalize(text, status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalization failed");
  return out;
}

bool is_joiner(UChar32 c) {
  switch (c) {
    case 0x0027:  // apostrophe
    case 0x002D:  // hyphen-minus
    case 0x2010:  // hyphen
    case 0x2011:  // non-breaking hyphen
    case 0x2019:  // right single quotation mark
      return true;
    default:
      return false;
  }
}

}  // namespace

TokenList normalize(std::string_view raw, const NormalizationConfig& config) {
  if (config.max_tokens < 1) throw ArgumentError("max_tokens must be >= 1");

  icu::UnicodeString text = to_nfc(icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size()))));
  if (config.lowercase) {
    text.toLower(icu::Locale::getRoot());
    text = to_nfc(text);
  }

  std::vector<UChar32> cps;
  cps.reserve(static_cast<std::size_t>(text.length()));
  for (int32_t i = 0; i < text.length(); i = text.moveIndex32(i, 1)) {
    cps.push_back(text.char32At(i));
  }

  if (config.strip_punctuation) {
    // Decide against the original neighbours so "a--b" splits cleanly.
    std::vector<UChar32> stripped = cps;
    for (std::size_t i = 0; i < cps.size(); ++i) {
      if (!u_ispunct(cps[i])) continue;
      const bool inside_word = is_joiner(cps[i]) && i > 0 && i + 1 < cps.size() &&
                               u_isalnum(cps[i - 1]) && u_isalnum(cps[i + 1]);
      if (!inside_word) stripped[i] = 0x20;
    }
    cps = std::move(stripped);
  }

  TokenList tokens;
  icu::UnicodeString current;
  auto flush = [&] {
    if (current.isEmpty()) return;
    std::string utf8;
    current.toUTF8String(utf8);
    tokens.push_back(std::move(utf8));
    current.remove();
  };
  for (UChar32 c : cps) {
    if (u_isUWhiteSpace(c)) {
      flush();
      if (tokens.size() >= config.max_tokens) break;
    } else {
      current.append(c);
    }
  }
  flush();
  if (tokens.size() > config.max_tokens) tokens.resize(config.max_tokens);
  return tokens;
}

std::string join_tokens(const TokenList& tokens, char sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(sep);
    out += tokens[i];
  }
  return out;
}

}  // namespace corrnet
