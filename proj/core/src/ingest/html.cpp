#include "newscheck/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <set>

#include "newscheck/error.hpp"
#include "newscheck/unicode.hpp"

namespace newscheck::html {

namespace {

constexpr std::array<std::pair<std::string_view, char32_t>, 62> kEntities{{
    {"amp", U'&'},     {"lt", U'<'},       {"gt", U'>'},       {"quot", U'"'},     {"apos", U'\''},
    {"nbsp", 0xA0},    {"ndash", 0x2013},  {"mdash", 0x2014},  {"hellip", 0x2026}, {"lsquo", 0x2018},
    {"rsquo", 0x2019}, {"ldquo", 0x201C},  {"rdquo", 0x201D},  {"laquo", 0xAB},    {"raquo", 0xBB},
    {"ordf", 0xAA},    {"ordm", 0xBA},     {"deg", 0xB0},      {"copy", 0xA9},     {"reg", 0xAE},
    {"euro", 0x20AC},  {"middot", 0xB7},   {"bull", 0x2022},   {"iexcl", 0xA1},    {"iquest", 0xBF},
    {"aacute", U'á'},  {"agrave", U'à'},   {"acirc", U'â'},    {"atilde", U'ã'},   {"auml", U'ä'},
    {"ccedil", U'ç'},  {"eacute", U'é'},   {"egrave", U'è'},   {"ecirc", U'ê'},    {"euml", U'ë'},
    {"iacute", U'í'},  {"igrave", U'ì'},   {"icirc", U'î'},    {"iuml", U'ï'},     {"ntilde", U'ñ'},
    {"oacute", U'ó'},  {"ograve", U'ò'},   {"ocirc", U'ô'},    {"otilde", U'õ'},   {"ouml", U'ö'},
    {"uacute", U'ú'},  {"ugrave", U'ù'},   {"ucirc", U'û'},    {"uuml", U'ü'},     {"Aacute", U'Á'},
    {"Agrave", U'À'},  {"Acirc", U'Â'},    {"Atilde", U'Ã'},   {"Ccedil", U'Ç'},   {"Eacute", U'É'},
    {"Ecirc", U'Ê'},   {"Iacute", U'Í'},   {"Oacute", U'Ó'},   {"Ocirc", U'Ô'},    {"Otilde", U'Õ'},
    {"Uacute", U'Ú'},  {"shy", 0xAD},
}};

const std::set<std::string, std::less<>> kVoid{"area", "base", "br",   "col",   "embed",  "hr",    "img",
                                               "input", "link", "meta", "param", "source", "track", "wbr"};
const std::set<std::string, std::less<>> kRaw{"script", "style"};
const std::set<std::string, std::less<>> kHidden{"script", "style", "noscript", "template", "head"};
const std::set<std::string, std::less<>> kBlock{
    "address", "article", "aside", "blockquote", "br",      "dd",     "div",    "dl",  "dt",   "figcaption",
    "figure",  "footer",  "form",  "h1",         "h2",      "h3",     "h4",     "h5",  "h6",   "header",
    "hr",      "li",      "main",  "nav",        "ol",      "p",      "pre",    "section", "table", "td",
    "th",      "tr",      "ul",    "title"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

}  // namespace

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i + 1;
    char32_t cp = 0;
    bool ok = false;
    if (j < s.size() && s[j] == '#') {
      ++j;
      int base = 10;
      if (j < s.size() && (s[j] == 'x' || s[j] == 'X')) {
        base = 16;
        ++j;
      }
      const std::size_t start = j;
      while (j < s.size() && j - start < 8 && std::isxdigit(static_cast<unsigned char>(s[j]))) ++j;
      std::uint32_t v = 0;
      if (j > start && j < s.size() && s[j] == ';') {
        auto [p, ec] = std::from_chars(s.data() + start, s.data() + j, v, base);
        ok = ec == std::errc{} && p == s.data() + j && v > 0 && v <= 0x10FFFF && (v < 0xD800 || v > 0xDFFF);
        cp = v;
      }
    } else {
      const std::size_t start = j;
      while (j < s.size() && j - start < 10 && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == ';') {
        const auto name = s.substr(start, j - start);
        for (const auto& [n, c] : kEntities) {
          if (n == name) {
            cp = c;
            ok = true;
            break;
          }
        }
      }
    }
    if (ok) {
      unicode::append_utf8(out, cp);
      i = j + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

const std::string* Node::attribute(std::string_view name) const {
  for (const auto& [k, v] : attributes) {
    if (k == name) return &v;
  }
  return nullptr;
}

bool Node::has_class(std::string_view cls) const {
  const auto* v = attribute("class");
  if (v == nullptr) return false;
  std::size_t i = 0;
  while (i < v->size()) {
    while (i < v->size() && is_space((*v)[i])) ++i;
    std::size_t j = i;
    while (j < v->size() && !is_space((*v)[j])) ++j;
    if (j > i && std::string_view(*v).substr(i, j - i) == cls) return true;
    i = j;
  }
  return false;
}

Document::Document(std::string_view s) {
  nodes_.emplace_back();
  std::vector<int> open{0};
  auto add = [&](Node n) {
    const int parent = open.back();
    n.parent = parent;
    nodes_.push_back(std::move(n));
    const int id = static_cast<int>(nodes_.size() - 1);
    nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
  };
  auto add_text = [&](std::string_view raw, bool decode) {
    if (raw.empty()) return;
    Node t;
    t.is_text = true;
    t.text = decode ? decode_entities(raw) : std::string(raw);
    add(std::move(t));
  };
  auto close_to = [&](const std::string& tag) {
    for (std::size_t k = open.size(); k-- > 1;) {
      if (nodes_[static_cast<std::size_t>(open[k])].tag == tag) {
        open.resize(k);
        return;
      }
    }
  };

  std::size_t i = 0;
  std::size_t text_start = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      ++i;
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      add_text(s.substr(text_start, i - text_start), true);
      const auto end = s.find("-->", i + 4);
      i = end == std::string_view::npos ? s.size() : end + 3;
      text_start = i;
      continue;
    }
    const bool is_end = i + 1 < s.size() && s[i + 1] == '/';
    const std::size_t name_start = i + (is_end ? 2 : 1);
    if (name_start < s.size() && (s[name_start] == '!' || s[name_start] == '?')) {
      add_text(s.substr(text_start, i - text_start), true);
      const auto end = s.find('>', name_start);
      i = end == std::string_view::npos ? s.size() : end + 1;
      text_start = i;
      continue;
    }
    if (name_start >= s.size() || !std::isalpha(static_cast<unsigned char>(s[name_start]))) {
      ++i;
      continue;
    }
    add_text(s.substr(text_start, i - text_start), true);
    std::size_t j = name_start;
    while (j < s.size() && !is_space(s[j]) && s[j] != '>' && s[j] != '/') ++j;
    const std::string tag = lower(s.substr(name_start, j - name_start));

    Node element;
    element.tag = tag;
    bool self_closing = false;
    // Attributes.
    while (j < s.size() && s[j] != '>') {
      if (is_space(s[j])) {
        ++j;
        continue;
      }
      if (s[j] == '/') {
        self_closing = true;
        ++j;
        continue;
      }
      self_closing = false;
      std::size_t k = j;
      while (k < s.size() && !is_space(s[k]) && s[k] != '=' && s[k] != '>' && s[k] != '/') ++k;
      std::string name = lower(s.substr(j, k - j));
      while (k < s.size() && is_space(s[k])) ++k;
      std::string value;
      if (k < s.size() && s[k] == '=') {
        ++k;
        while (k < s.size() && is_space(s[k])) ++k;
        if (k < s.size() && (s[k] == '"' || s[k] == '\'')) {
          const char q = s[k];
          const auto end = s.find(q, k + 1);
          const auto stop = end == std::string_view::npos ? s.size() : end;
          value = decode_entities(s.substr(k + 1, stop - k - 1));
          k = stop == s.size() ? stop : stop + 1;
        } else {
          std::size_t e = k;
          while (e < s.size() && !is_space(s[e]) && s[e] != '>') ++e;
          value = decode_entities(s.substr(k, e - k));
          k = e;
        }
      }
      if (!name.empty() && !is_end) element.attributes.emplace_back(std::move(name), std::move(value));
      j = k == j ? j + 1 : k;
    }
    i = j < s.size() ? j + 1 : s.size();
    text_start = i;

    if (is_end) {
      close_to(tag);
      continue;
    }
    const auto& current = nodes_[static_cast<std::size_t>(open.back())].tag;
    if ((tag == "p" && current == "p") || (tag == "li" && current == "li")) open.pop_back();
    const int id = add(std::move(element));
    if (kVoid.count(tag) || self_closing) continue;
    if (kRaw.count(tag)) {
      const std::string close = "</" + tag;
      std::size_t end = i;
      for (;;) {
        end = s.find("</", end);
        if (end == std::string_view::npos || lower(s.substr(end, close.size())) == close) break;
        end += 2;
      }
      if (end == std::string_view::npos) end = s.size();
      open.push_back(id);
      add_text(s.substr(i, end - i), false);
      open.pop_back();
      const auto gt = s.find('>', end);
      i = end == s.size() || gt == std::string_view::npos ? s.size() : gt + 1;
      text_start = i;
      continue;
    }
    open.push_back(id);
  }
  add_text(s.substr(text_start), true);
}

std::string Document::text(int id) const {
  std::string raw;
  std::vector<std::pair<int, bool>> stack{{id, false}};
  while (!stack.empty()) {
    auto [n, closing] = stack.back();
    stack.pop_back();
    const auto& node = nodes_[static_cast<std::size_t>(n)];
    if (closing) {
      raw.push_back(' ');
      continue;
    }
    if (node.is_text) {
      raw += node.text;
      continue;
    }
    if (n != id && kHidden.count(node.tag)) continue;
    const bool block = kBlock.count(node.tag) > 0;
    if (block) {
      raw.push_back(' ');
      stack.emplace_back(n, true);
    }
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.emplace_back(*it, false);
  }
  // Collapse every Unicode space run.
  std::string out;
  bool pending = false;
  for (char32_t cp : unicode::to_utf32(raw)) {
    if (unicode::is_space(cp) || cp == 0xA0) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    unicode::append_utf8(out, cp);
  }
  return out;
}

// ---------------------------------------------------------------- selectors

namespace {

struct AttrTest {
  std::string name;
  char op = 0;  // 0 presence, '=' exact, '~' word, '^' prefix, '$' suffix, '*' substring
  std::string value;
};

struct Compound {
  std::string tag;  // empty or "*" matches any
  std::vector<std::string> ids;
  std::vector<std::string> classes;
  std::vector<AttrTest> attrs;
};

struct Complex {
  std::vector<Compound> parts;
  std::vector<char> combinators;  // between parts[i] and parts[i+1]: ' ' or '>'
};

[[noreturn]] void bad(std::string_view sel, const std::string& why) {
  throw ValidationError("bad selector '" + std::string(sel) + "': " + why);
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

std::vector<Complex> parse_selector(std::string_view sel) {
  std::vector<Complex> groups(1);
  std::size_t i = 0;
  char pending = 0;
  bool have_compound = false;
  auto ident = [&]() {
    const std::size_t start = i;
    while (i < sel.size() && ident_char(sel[i])) ++i;
    if (i == start) bad(sel, "expected a name at offset " + std::to_string(start));
    return std::string(sel.substr(start, i - start));
  };
  while (i < sel.size()) {
    const char c = sel[i];
    if (is_space(c)) {
      if (have_compound && pending == 0) pending = ' ';
      ++i;
      continue;
    }
    if (c == '>') {
      if (!have_compound) bad(sel, "combinator without a left side");
      pending = '>';
      ++i;
      continue;
    }
    if (c == ',') {
      if (!have_compound || pending == '>') bad(sel, "empty group");
      groups.emplace_back();
      have_compound = false;
      pending = 0;
      ++i;
      continue;
    }
    Compound comp;
    bool any = false;
    while (i < sel.size() && !is_space(sel[i]) && sel[i] != '>' && sel[i] != ',') {
      const char d = sel[i];
      if (d == '*') {
        comp.tag = "*";
        ++i;
      } else if (d == '#') {
        ++i;
        comp.ids.push_back(ident());
      } else if (d == '.') {
        ++i;
        comp.classes.push_back(ident());
      } else if (d == '[') {
        ++i;
        while (i < sel.size() && is_space(sel[i])) ++i;
        AttrTest t;
        t.name = lower(ident());
        while (i < sel.size() && is_space(sel[i])) ++i;
        if (i < sel.size() && sel[i] != ']') {
          if (sel[i] == '=') {
            t.op = '=';
            ++i;
          } else if (i + 1 < sel.size() && sel[i + 1] == '=' && std::string_view("~^$*").find(sel[i]) != std::string_view::npos) {
            t.op = sel[i];
            i += 2;
          } else {
            bad(sel, "unsupported attribute operator");
          }
          while (i < sel.size() && is_space(sel[i])) ++i;
          if (i < sel.size() && (sel[i] == '"' || sel[i] == '\'')) {
            const char q = sel[i];
            const auto end = sel.find(q, i + 1);
            if (end == std::string_view::npos) bad(sel, "unterminated string");
            t.value = std::string(sel.substr(i + 1, end - i - 1));
            i = end + 1;
          } else {
            t.value = ident();
          }
          while (i < sel.size() && is_space(sel[i])) ++i;
        }
        if (i >= sel.size() || sel[i] != ']') bad(sel, "missing ']'");
        ++i;
        comp.attrs.push_back(std::move(t));
      } else if (ident_char(d)) {
        if (any) bad(sel, "type selector must come first");
        comp.tag = lower(ident());
      } else {
        bad(sel, std::string("unexpected character '") + d + "'");
      }
      any = true;
    }
    auto& g = groups.back();
    if (have_compound) g.combinators.push_back(pending == 0 ? ' ' : pending);
    g.parts.push_back(std::move(comp));
    have_compound = true;
    pending = 0;
  }
  if (!have_compound || pending == '>') bad(sel, "selector is incomplete");
  return groups;
}

bool matches(const Node& n, const Compound& c) {
  if (n.is_text || n.tag.empty()) return false;
  if (!c.tag.empty() && c.tag != "*" && c.tag != n.tag) return false;
  for (const auto& id : c.ids) {
    const auto* v = n.attribute("id");
    if (v == nullptr || *v != id) return false;
  }
  for (const auto& cls : c.classes) {
    if (!n.has_class(cls)) return false;
  }
  for (const auto& t : c.attrs) {
    const auto* v = n.attribute(t.name);
    if (v == nullptr) return false;
    const std::string_view s = *v;
    switch (t.op) {
      case 0: break;
      case '=': if (s != t.value) return false; break;
      case '^': if (t.value.empty() || s.substr(0, t.value.size()) != t.value) return false; break;
      case '$':
        if (t.value.empty() || s.size() < t.value.size() || s.substr(s.size() - t.value.size()) != t.value) return false;
        break;
      case '*': if (t.value.empty() || s.find(t.value) == std::string_view::npos) return false; break;
      case '~': {
        Node probe;
        probe.attributes.emplace_back("class", std::string(s));
        if (!probe.has_class(t.value)) return false;
        break;
      }
    }
  }
  return true;
}

}  // namespace

std::vector<int> Document::select(std::string_view selector) const {
  const auto groups = parse_selector(selector);
  // Right-to-left match with backtracking over ancestors.
  auto match_from = [&](const Complex& cx, int node) {
    auto rec = [&](auto&& self, int part, int at) -> bool {
      if (!matches(nodes_[static_cast<std::size_t>(at)], cx.parts[static_cast<std::size_t>(part)])) return false;
      if (part == 0) return true;
      const char comb = cx.combinators[static_cast<std::size_t>(part - 1)];
      int p = nodes_[static_cast<std::size_t>(at)].parent;
      if (comb == '>') return p >= 0 && self(self, part - 1, p);
      for (; p >= 0; p = nodes_[static_cast<std::size_t>(p)].parent) {
        if (self(self, part - 1, p)) return true;
      }
      return false;
    };
    return rec(rec, static_cast<int>(cx.parts.size()) - 1, node);
  };
  std::vector<int> out;
  for (std::size_t n = 1; n < nodes_.size(); ++n) {
    for (const auto& g : groups) {
      if (match_from(g, static_cast<int>(n))) {
        out.push_back(static_cast<int>(n));
        break;
      }
    }
  }
  return out;
}

std::optional<int> Document::select_first(std::string_view selector) const {
  auto all = select(selector);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace newscheck::html
