#pragma once

#include <string>
#include <string_view>

namespace evidx {

/// NFKC, lowercase, whitespace runs collapsed to one space, trimmed, and
/// leading/trailing punctuation removed. Internal punctuation is kept.
std::string normalize(std::string_view text);

std::u32string utf8_to_u32(std::string_view text);
std::string u32_to_utf8(std::u32string_view text);

/// Number of Unicode code points.
std::size_t utf8_length(std::string_view text);

}  // namespace evidx
