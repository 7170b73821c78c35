#include "newscheck/stemmer.hpp"

#include <array>
#include <span>

#include "newscheck/unicode.hpp"

namespace newscheck {

namespace {

using Word = std::u32string;

// Suffix tables. Nasal vowels appear in their prelude form ("a~", "o~").
enum StandardAction {
  kDeleteR2 = 1,
  kLog,
  kU,
  kEnte,
  kAmente,
  kMente,
  kIdade,
  kIva,
  kIra,
};

struct StandardSuffix {
  std::u32string_view text;
  StandardAction action;
};

constexpr std::array<StandardSuffix, 45> kStandard{{
    {U"ica", kDeleteR2},     {U"ância", kDeleteR2},  {U"ência", kEnte},
    {U"logia", kLog},        {U"ira", kIra},         {U"adora", kDeleteR2},
    {U"osa", kDeleteR2},     {U"ista", kDeleteR2},   {U"iva", kIva},
    {U"eza", kDeleteR2},     {U"idade", kIdade},     {U"ante", kDeleteR2},
    {U"mente", kMente},      {U"amente", kAmente},   {U"ável", kDeleteR2},
    {U"ível", kDeleteR2},    {U"ico", kDeleteR2},    {U"ismo", kDeleteR2},
    {U"oso", kDeleteR2},     {U"amento", kDeleteR2}, {U"imento", kDeleteR2},
    {U"ivo", kIva},          {U"aça~o", kDeleteR2},  {U"uça~o", kU},
    {U"ador", kDeleteR2},    {U"icas", kDeleteR2},   {U"ências", kEnte},
    {U"logias", kLog},       {U"iras", kIra},        {U"adoras", kDeleteR2},
    {U"osas", kDeleteR2},    {U"istas", kDeleteR2},  {U"ivas", kIva},
    {U"ezas", kDeleteR2},    {U"idades", kIdade},    {U"adores", kDeleteR2},
    {U"antes", kDeleteR2},   {U"aço~es", kDeleteR2}, {U"uço~es", kU},
    {U"icos", kDeleteR2},    {U"ismos", kDeleteR2},  {U"osos", kDeleteR2},
    {U"amentos", kDeleteR2}, {U"imentos", kDeleteR2}, {U"ivos", kIva},
}};

constexpr std::array<std::u32string_view, 4> kAmenteFollow{U"ic", U"ad", U"os", U"iv"};
constexpr std::array<std::u32string_view, 3> kMenteFollow{U"ante", U"avel", U"ível"};
constexpr std::array<std::u32string_view, 3> kIdadeFollow{U"ic", U"abil", U"iv"};

constexpr std::array<std::u32string_view, 120> kVerb{
    U"ada",    U"ida",    U"ia",      U"aria",    U"eria",    U"iria",   U"ara",    U"era",
    U"ira",    U"ava",    U"asse",    U"esse",    U"isse",    U"aste",   U"este",   U"iste",
    U"ei",     U"arei",   U"erei",    U"irei",    U"am",      U"iam",    U"ariam",  U"eriam",
    U"iriam",  U"aram",   U"eram",    U"iram",    U"avam",    U"em",     U"arem",   U"erem",
    U"irem",   U"assem",  U"essem",   U"issem",   U"ado",     U"ido",    U"ando",   U"endo",
    U"indo",   U"ara~o",  U"era~o",   U"ira~o",   U"ar",      U"er",     U"ir",     U"as",
    U"adas",   U"idas",   U"ias",     U"arias",   U"erias",   U"irias",  U"aras",   U"eras",
    U"iras",   U"avas",   U"es",      U"ardes",   U"erdes",   U"irdes",  U"ares",   U"eres",
    U"ires",   U"asses",  U"esses",   U"isses",   U"astes",   U"estes",  U"istes",  U"is",
    U"ais",    U"eis",    U"areis",   U"ereis",   U"ireis",   U"áreis",  U"éreis",  U"íreis",
    U"ásseis", U"ésseis", U"ísseis",  U"áveis",   U"íeis",    U"aríeis", U"eríeis", U"iríeis",
    U"ados",   U"idos",   U"amos",    U"áramos",  U"éramos",  U"íramos", U"ávamos", U"íamos",
    U"aríamos", U"eríamos", U"iríamos", U"emos",  U"aremos",  U"eremos", U"iremos", U"ássemos",
    U"êssemos", U"íssemos", U"imos",  U"armos",   U"ermos",   U"irmos",  U"ámos",   U"arás",
    U"erás",   U"irás",   U"eu",      U"iu",      U"ou",      U"ará",    U"erá",    U"irá",
};

constexpr std::array<std::u32string_view, 7> kResidual{U"a", U"i", U"o", U"os", U"á", U"í", U"ó"};

bool is_vowel(char32_t c) {
  switch (c) {
    case U'a': case U'e': case U'i': case U'o': case U'u':
    case U'á': case U'â': case U'é': case U'ê': case U'í':
    case U'ó': case U'ô': case U'ú':
      return true;
    default:
      return false;
  }
}

class PortugueseStemmer {
 public:
  explicit PortugueseStemmer(Word word) : w_(std::move(word)) {}

  Word run() {
    prelude();
    mark_regions();
    const bool altered = standard_suffix() || verb_suffix();
    if (altered) {
      // Delete a final 'i' preceded by 'c' when in RV.
      const std::size_t n = w_.size();
      if (n >= 2 && w_[n - 1] == U'i' && w_[n - 2] == U'c' && n - 1 >= rv_) {
        w_.pop_back();
      }
    } else {
      residual_suffix();
    }
    residual_form();
    postlude();
    return std::move(w_);
  }

 private:
  void prelude() {
    Word out;
    out.reserve(w_.size() + 2);
    for (char32_t c : w_) {
      if (c == U'ã') {
        out += U"a~";
      } else if (c == U'õ') {
        out += U"o~";
      } else {
        out.push_back(c);
      }
    }
    w_ = std::move(out);
  }

  void postlude() {
    Word out;
    out.reserve(w_.size());
    for (std::size_t i = 0; i < w_.size(); ++i) {
      if (i + 1 < w_.size() && w_[i + 1] == U'~' && (w_[i] == U'a' || w_[i] == U'o')) {
        out.push_back(w_[i] == U'a' ? U'ã' : U'õ');
        ++i;
      } else {
        out.push_back(w_[i]);
      }
    }
    w_ = std::move(out);
  }

  // Position just past the first vowel at or after `from`; npos if none.
  std::size_t past_vowel(std::size_t from) const {
    for (std::size_t i = from; i < w_.size(); ++i) {
      if (is_vowel(w_[i])) return i + 1;
    }
    return Word::npos;
  }

  std::size_t past_consonant(std::size_t from) const {
    for (std::size_t i = from; i < w_.size(); ++i) {
      if (!is_vowel(w_[i])) return i + 1;
    }
    return Word::npos;
  }

  void mark_regions() {
    const std::size_t n = w_.size();
    rv_ = r1_ = r2_ = n;
    if (n >= 2) {
      std::size_t pos = Word::npos;
      if (!is_vowel(w_[1])) {
        pos = past_vowel(2);
      } else if (is_vowel(w_[0])) {
        pos = past_consonant(2);
      } else {
        pos = 3 <= n ? 3 : Word::npos;
      }
      if (pos != Word::npos) rv_ = pos;
    }
    // R1: after the first non-vowel following a vowel; R2 likewise within R1.
    auto region_after = [&](std::size_t from) -> std::size_t {
      std::size_t v = past_vowel(from);
      if (v == Word::npos) return n;
      for (std::size_t i = v; i < n; ++i) {
        if (!is_vowel(w_[i])) return i + 1;
      }
      return n;
    };
    r1_ = region_after(0);
    r2_ = r1_ < n ? region_after(r1_) : n;
  }

  bool ends_with(std::u32string_view s, std::size_t end) const {
    return s.size() <= end && std::u32string_view(w_).substr(end - s.size(), s.size()) == s;
  }

  void replace_tail(std::size_t start, std::u32string_view with) {
    w_.replace(start, w_.size() - start, with);
  }

  // Longest listed suffix ending at the current word end that starts at or after `limit`.
  template <std::size_t N>
  std::size_t longest(const std::array<std::u32string_view, N>& list, std::size_t limit = 0) const {
    std::size_t best = 0;
    for (auto s : list) {
      if (s.size() > best && ends_with(s, w_.size()) && w_.size() - s.size() >= limit) best = s.size();
    }
    return best;
  }

  // Optional follow-up deletion of one of `list` if it lies in R2.
  template <std::size_t N>
  std::u32string_view delete_following_in_r2(const std::array<std::u32string_view, N>& list) {
    const std::size_t len = longest(list);
    if (len == 0) return {};
    const std::size_t start = w_.size() - len;
    if (start < r2_) return {};
    std::u32string_view matched;
    for (auto s : list) {
      if (s.size() == len && ends_with(s, w_.size())) matched = s;
    }
    w_.resize(start);
    return matched;
  }

  void delete_at_in_r2() {
    if (ends_with(U"at", w_.size()) && w_.size() - 2 >= r2_) w_.resize(w_.size() - 2);
  }

  bool standard_suffix() {
    const StandardSuffix* match = nullptr;
    for (const auto& s : kStandard) {
      if (ends_with(s.text, w_.size()) && (match == nullptr || s.text.size() > match->text.size())) {
        match = &s;
      }
    }
    if (match == nullptr) return false;
    const std::size_t start = w_.size() - match->text.size();

    switch (match->action) {
      case kDeleteR2:
        if (start < r2_) return false;
        w_.resize(start);
        return true;
      case kLog:
        if (start < r2_) return false;
        replace_tail(start, U"log");
        return true;
      case kU:
        if (start < r2_) return false;
        replace_tail(start, U"u");
        return true;
      case kEnte:
        if (start < r2_) return false;
        replace_tail(start, U"ente");
        return true;
      case kAmente:
        if (start < r1_) return false;
        w_.resize(start);
        if (delete_following_in_r2(kAmenteFollow) == U"iv") delete_at_in_r2();
        return true;
      case kMente:
        if (start < r2_) return false;
        w_.resize(start);
        delete_following_in_r2(kMenteFollow);
        return true;
      case kIdade:
        if (start < r2_) return false;
        w_.resize(start);
        delete_following_in_r2(kIdadeFollow);
        return true;
      case kIva:
        if (start < r2_) return false;
        w_.resize(start);
        delete_at_in_r2();
        return true;
      case kIra:
        if (start < rv_ || start == 0 || w_[start - 1] != U'e') return false;
        replace_tail(start, U"ir");
        return true;
    }
    return false;
  }

  bool verb_suffix() {
    const std::size_t len = longest(kVerb, rv_);
    if (len == 0) return false;
    w_.resize(w_.size() - len);
    return true;
  }

  void residual_suffix() {
    const std::size_t len = longest(kResidual);
    if (len == 0 || w_.size() - len < rv_) return;
    w_.resize(w_.size() - len);
  }

  void residual_form() {
    if (w_.empty()) return;
    const char32_t last = w_.back();
    if (last == U'ç') {
      w_.back() = U'c';
      return;
    }
    if (last != U'e' && last != U'é' && last != U'ê') return;
    if (w_.size() - 1 < rv_) return;
    w_.pop_back();
    const std::size_t n = w_.size();
    if (n >= 2 && ((w_[n - 1] == U'u' && w_[n - 2] == U'g') || (w_[n - 1] == U'i' && w_[n - 2] == U'c')) &&
        n - 1 >= rv_) {
      w_.pop_back();
    }
  }

  Word w_;
  std::size_t rv_ = 0;
  std::size_t r1_ = 0;
  std::size_t r2_ = 0;
};

}  // namespace

std::string stem_portuguese(std::string_view word) {
  if (word.empty()) return {};
  return unicode::to_utf8(PortugueseStemmer(unicode::to_utf32(word)).run());
}

}  // namespace newscheck
