#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace storymap::utf8 {

// Decodes the code point starting at text[pos] and advances pos past it.
// Malformed bytes decode to U+FFFD and consume a single byte.
char32_t next(std::string_view text, std::size_t& pos);

void append(std::string& out, char32_t cp);

// Letters: ASCII alphabet plus every non-ASCII code point that is not in one of
// the punctuation, symbol, space or control ranges listed in utf8.cpp.
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_apostrophe(char32_t cp);

// Simple case folding: ASCII, Latin-1 Supplement, Latin Extended-A, Greek and
// basic Cyrillic capitals. Other code points are returned unchanged.
char32_t to_lower(char32_t cp);

}  // namespace storymap::utf8
