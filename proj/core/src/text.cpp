#include "evidx/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace evidx {

std::string normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFKC normalizer unavailable");

  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString folded = nfkc->normalize(source, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  folded.toLower(icu::Locale::getRoot());

  std::string utf8;
  folded.toUTF8String(utf8);

  std::u32string cps = utf8_to_u32(utf8);
  std::u32string collapsed;
  bool pending_space = false;
  for (char32_t c : cps) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(U' ');
    pending_space = false;
    collapsed.push_back(c);
  }

  auto strippable = [](char32_t c) {
    return u_ispunct(static_cast<UChar32>(c)) || c == U' ';
  };
  std::size_t begin = 0;
  std::size_t end = collapsed.size();
  while (begin < end && strippable(collapsed[begin])) ++begin;
  while (end > begin && strippable(collapsed[end - 1])) --end;
  return u32_to_utf8(std::u32string_view(collapsed).substr(begin, end - begin));
}

std::u32string utf8_to_u32(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

std::string u32_to_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) continue;
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

std::size_t utf8_length(std::string_view text) { return utf8_to_u32(text).size(); }

}  // namespace evidx
