#ifndef SIEVE_TEXT_HPP
#define SIEVE_TEXT_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace sieve {

// ASCII whitespace set used throughout: space, tab, newline, carriage
// return, vertical tab, form feed.
bool is_space(char c);

// Collapses every maximal run of whitespace to a single space and strips
// leading/trailing whitespace. Idempotent; empty input stays empty.
std::string normalize_whitespace(std::string_view text);

// Character count of a UTF-8 string, counted in code points (continuation
// bytes do not count). Invalid bytes count as one character each.
std::size_t utf8_length(std::string_view text);

// Decodes the code point starting at byte offset `pos`; advances `pos`
// past it. Malformed sequences decode byte-wise as U+00..FF.
char32_t utf8_next(std::string_view text, std::size_t& pos);

std::string ascii_lower(std::string_view word);

} // namespace sieve

#endif // SIEVE_TEXT_HPP
