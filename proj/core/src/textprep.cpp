#include "newscheck/textprep.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <utility>

#include "newscheck/error.hpp"
#include "newscheck/stemmer.hpp"
#include "newscheck/unicode.hpp"

namespace newscheck {

std::string_view to_string(TerminalStage stage) {
  switch (stage) {
    case TerminalStage::Stem:
      return "stem";
    case TerminalStage::Phrase:
      return "phrase";
    case TerminalStage::None:
      return "none";
  }
  return "none";
}

TerminalStage parse_terminal_stage(std::string_view text) {
  if (text == "stem") return TerminalStage::Stem;
  if (text == "phrase") return TerminalStage::Phrase;
  if (text == "none") return TerminalStage::None;
  throw ConfigError("unknown terminal stage '" + std::string(text) + "'");
}

PrepConfig PrepConfig::for_tfidf() {
  PrepConfig c;
  c.terminal_stage = TerminalStage::Stem;
  return c;
}

PrepConfig PrepConfig::for_word2vec() {
  PrepConfig c;
  c.terminal_stage = TerminalStage::Phrase;
  return c;
}

void to_json(nlohmann::json& j, const PrepConfig& c) {
  j = nlohmann::json{{"lowercase", c.lowercase},
                     {"strip_html_and_links", c.strip_html_and_links},
                     {"strip_accents", c.strip_accents},
                     {"strip_special_chars", c.strip_special_chars},
                     {"strip_punctuation", c.strip_punctuation},
                     {"remove_stopwords", c.remove_stopwords},
                     {"terminal_stage", std::string(to_string(c.terminal_stage))}};
}

void from_json(const nlohmann::json& j, PrepConfig& c) {
  c.lowercase = j.value("lowercase", c.lowercase);
  c.strip_html_and_links = j.value("strip_html_and_links", c.strip_html_and_links);
  c.strip_accents = j.value("strip_accents", c.strip_accents);
  c.strip_special_chars = j.value("strip_special_chars", c.strip_special_chars);
  c.strip_punctuation = j.value("strip_punctuation", c.strip_punctuation);
  c.remove_stopwords = j.value("remove_stopwords", c.remove_stopwords);
  if (j.contains("terminal_stage")) {
    c.terminal_stage = parse_terminal_stage(j.at("terminal_stage").get<std::string>());
  }
}

namespace {

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
  }
  return true;
}

bool ascii_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Latin letter entities; anything else that is not a letter or digit becomes a space.
constexpr std::array<std::pair<std::string_view, char32_t>, 28> kLetterEntities{{
    {"aacute", U'á'}, {"agrave", U'à'}, {"acirc", U'â'}, {"atilde", U'ã'}, {"auml", U'ä'},
    {"ccedil", U'ç'}, {"eacute", U'é'}, {"egrave", U'è'}, {"ecirc", U'ê'}, {"euml", U'ë'},
    {"iacute", U'í'}, {"igrave", U'ì'}, {"icirc", U'î'}, {"iuml", U'ï'},   {"ntilde", U'ñ'},
    {"oacute", U'ó'}, {"ograve", U'ò'}, {"ocirc", U'ô'}, {"otilde", U'õ'}, {"ouml", U'ö'},
    {"uacute", U'ú'}, {"ugrave", U'ù'}, {"ucirc", U'û'}, {"uuml", U'ü'},   {"Aacute", U'Á'},
    {"Eacute", U'É'}, {"Ccedil", U'Ç'}, {"Atilde", U'Ã'},
}};

// Parses an entity at s[pos] == '&'. Returns its length (0 if none) and the decoded letter or 0.
std::pair<std::size_t, char32_t> parse_entity(std::string_view s, std::size_t pos) {
  std::size_t i = pos + 1;
  if (i < s.size() && s[i] == '#') {
    ++i;
    int base = 10;
    if (i < s.size() && (s[i] == 'x' || s[i] == 'X')) {
      base = 16;
      ++i;
    }
    const std::size_t start = i;
    while (i < s.size() && i - start < 7 && std::isxdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start || i >= s.size() || s[i] != ';') return {0, 0};
    std::uint32_t value = 0;
    auto [p, ec] = std::from_chars(s.data() + start, s.data() + i, value, base);
    if (ec != std::errc{} || p != s.data() + i) return {0, 0};
    const auto cp = static_cast<char32_t>(value);
    const bool keep = value <= 0x10FFFF && (unicode::is_letter(cp) || unicode::is_digit(cp));
    return {i + 1 - pos, keep ? cp : 0};
  }
  const std::size_t start = i;
  while (i < s.size() && i - start < 10 && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
  if (i - start < 2 || i >= s.size() || s[i] != ';') return {0, 0};
  const std::string_view name = s.substr(start, i - start);
  for (const auto& [entity, cp] : kLetterEntities) {
    if (entity == name) return {i + 1 - pos, cp};
  }
  return {i + 1 - pos, 0};
}

std::string strip_markup_and_links(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '<') {
      if (s.compare(i, 4, "<!--") == 0) {
        const auto end = s.find("-->", i + 4);
        i = end == std::string_view::npos ? s.size() : end + 3;
        out.push_back(' ');
        continue;
      }
      const bool tag_like = i + 1 < s.size() && (std::isalpha(static_cast<unsigned char>(s[i + 1])) ||
                                                 s[i + 1] == '/' || s[i + 1] == '!' || s[i + 1] == '?');
      const auto close = tag_like ? s.find('>', i + 1) : std::string_view::npos;
      if (close != std::string_view::npos) {
        for (std::string_view raw : {"script", "style"}) {
          if (starts_with_ci(s, i + 1, raw)) {
            const std::string end_tag = "</" + std::string(raw);
            std::size_t j = close + 1;
            while (j < s.size() && !starts_with_ci(s, j, end_tag)) ++j;
            const auto end_close = s.find('>', j);
            i = (j >= s.size() || end_close == std::string_view::npos) ? s.size() : end_close;
            break;
          }
        }
        i = std::max(i, close) + 1;
        out.push_back(' ');
        continue;
      }
    } else if (c == '&') {
      const auto [len, cp] = parse_entity(s, i);
      if (len > 0) {
        if (cp != 0) {
          unicode::append_utf8(out, cp);
        } else {
          out.push_back(' ');
        }
        i += len;
        continue;
      }
    } else if ((c == 'h' || c == 'H' || c == 'w' || c == 'W') && (i == 0 || !ascii_alnum(s[i - 1])) &&
               (starts_with_ci(s, i, "http://") || starts_with_ci(s, i, "https://") ||
                starts_with_ci(s, i, "www."))) {
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '<' &&
             s[i] != '"') {
        ++i;
      }
      out.push_back(' ');
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'’'; }
bool is_word_char(char32_t cp) { return unicode::is_letter(cp) || unicode::is_digit(cp); }

// Character classes are decided on the input, so the pass is stable under repetition.
std::u32string filter_characters(const std::u32string& text, const PrepConfig& config) {
  std::u32string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char32_t cp = text[i];
    if (is_apostrophe(cp)) {
      const bool inner = i > 0 && i + 1 < text.size() && is_word_char(text[i - 1]) && is_word_char(text[i + 1]);
      if (inner || !(config.strip_special_chars || config.strip_punctuation)) {
        out.push_back(inner ? U'\'' : cp);
      } else {
        out.push_back(U' ');
      }
      continue;
    }
    bool drop = false;
    if (config.strip_special_chars) {
      drop = !(is_word_char(cp) || unicode::is_space(cp));
    }
    if (config.strip_punctuation && unicode::is_punctuation(cp)) {
      drop = true;
    }
    out.push_back(drop ? U' ' : cp);
  }
  return out;
}

std::string collapse_whitespace(const std::u32string& text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t cp : text) {
    if (unicode::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    unicode::append_utf8(out, cp);
  }
  return out;
}

}  // namespace

std::string clean(std::string_view text, const PrepConfig& config) {
  std::string s = unicode::nfc(text);
  if (config.strip_html_and_links) s = strip_markup_and_links(s);
  std::u32string cps = unicode::to_utf32(s);
  if (config.strip_special_chars || config.strip_punctuation) cps = filter_characters(cps, config);
  s = collapse_whitespace(cps);
  if (config.strip_accents) s = unicode::strip_accents(s);
  if (config.lowercase) s = unicode::to_lower(s);
  return s;
}

TokenStream tokenize(std::string_view text) {
  TokenStream tokens;
  std::string current;
  for (char32_t cp : unicode::to_utf32(text)) {
    if (unicode::is_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      unicode::append_utf8(current, cp);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TokenStream remove_stopwords(const TokenStream& tokens, const StopList& stop_list) {
  TokenStream out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stop_list.contains(t)) out.push_back(t);
  }
  return out;
}

TokenStream stem(const TokenStream& tokens) {
  TokenStream out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::string s = stem_portuguese(t);
    out.push_back(s.empty() ? t : std::move(s));
  }
  return out;
}

TokenStream preprocess(std::string_view text, const PrepConfig& config, const StopList& stop_list) {
  TokenStream tokens = tokenize(clean(text, config));
  if (config.remove_stopwords) tokens = remove_stopwords(tokens, stop_list);
  if (config.terminal_stage == TerminalStage::Stem) tokens = stem(tokens);
  return tokens;
}

}  // namespace newscheck
