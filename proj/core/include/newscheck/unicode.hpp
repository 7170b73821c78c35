#pragma once

#include <string>
#include <string_view>

namespace newscheck::unicode {

std::u32string to_utf32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);
void append_utf8(std::string& out, char32_t cp);

/// Canonical composition (NFC).
std::string nfc(std::string_view utf8);

/// Canonical decomposition, drop nonspacing marks, recompose. "ação" -> "acao".
std::string strip_accents(std::string_view utf8);

/// Simple per-code-point lowercase mapping.
std::string to_lower(std::string_view utf8);

bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);
bool is_punctuation(char32_t cp);

}  // namespace newscheck::unicode
