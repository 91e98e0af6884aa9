#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace tsk {

struct DecodeResult {
    std::u32string text;
    std::size_t replacements = 0;  // invalid sequences mapped to U+FFFD
};

// Decodes UTF-8 into Unicode scalar values. Invalid or truncated sequences,
// overlongs and surrogates each become one U+FFFD.
DecodeResult decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view text);

// Re-encodes bytes as valid UTF-8, replacing invalid sequences.
DecodeResult sanitize_utf8(std::string_view bytes, std::string &out);

// Simple (one-to-one) lowercase mapping. Covers ASCII, Latin-1, Latin
// Extended-A, Greek and Cyrillic; everything else maps to itself.
char32_t to_lower(char32_t c);

std::u32string to_lower(std::u32string_view text);

}  // namespace tsk
