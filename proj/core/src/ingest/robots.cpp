#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "newscheck/digest.hpp"
#include "newscheck/ingest.hpp"

namespace newscheck {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Collapses "." and ".." segments of an absolute path (query untouched).
std::string remove_dot_segments(const std::string& path_query) {
  const auto q = path_query.find('?');
  const std::string path = path_query.substr(0, q);
  const std::string query = q == std::string::npos ? "" : path_query.substr(q);
  std::vector<std::string> out;
  std::size_t i = 0;
  bool trailing = false;
  while (i <= path.size()) {
    const auto j = std::min(path.find('/', i), path.size());
    const std::string seg = path.substr(i, j - i);
    trailing = j == path.size() && (seg == "." || seg == "..");
    if (seg == "..") {
      if (!out.empty()) out.pop_back();
    } else if (seg != "." && !(seg.empty() && j < path.size())) {
      out.push_back(seg);
    }
    i = j + 1;
  }
  std::string result;
  for (std::size_t k = 0; k < out.size(); ++k) {
    result += "/" + out[k];
  }
  if (result.empty() || trailing) result += "/";
  return result + query;
}

}  // namespace

std::string Url::origin() const {
  return scheme + "://" + host + (port ? ":" + std::to_string(port) : "");
}

std::string Url::str() const { return origin() + path; }

Url parse_url(std::string_view text) {
  text = trim(text);
  const auto sep = text.find("://");
  if (sep == std::string_view::npos) throw ValidationError("not an absolute URL: '" + std::string(text) + "'");
  Url u;
  u.scheme = lower(text.substr(0, sep));
  if (u.scheme != "http" && u.scheme != "https") {
    throw ValidationError("unsupported URL scheme '" + u.scheme + "'");
  }
  std::string_view rest = text.substr(sep + 3);
  const auto hash = rest.find('#');
  if (hash != std::string_view::npos) {
    u.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  const auto path_start = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, path_start);
  std::string path = path_start == std::string_view::npos ? "/" : std::string(rest.substr(path_start));
  if (!path.empty() && path.front() == '?') path = "/" + path;
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    const auto port_text = authority.substr(colon + 1);
    int port = 0;
    auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || p != port_text.data() + port_text.size() || port <= 0 || port > 65535) {
      throw ValidationError("bad port in URL '" + std::string(text) + "'");
    }
    u.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw ValidationError("URL has no host: '" + std::string(text) + "'");
  u.host = lower(authority);
  u.path = path;
  return u;
}

std::string resolve_url(const std::string& base, const std::string& ref_in) {
  const std::string ref(trim(ref_in));
  if (ref.find("://") != std::string::npos) return ref;
  const Url b = parse_url(base);
  if (ref.rfind("//", 0) == 0) return b.scheme + ":" + ref;
  if (ref.empty()) return b.str();
  if (ref.front() == '#') return b.str() + ref;
  if (ref.front() == '/') return b.origin() + remove_dot_segments(ref);
  std::string base_path = b.path.substr(0, b.path.find('?'));
  if (ref.front() == '?') return b.origin() + base_path + ref;
  base_path = base_path.substr(0, base_path.rfind('/') + 1);
  return b.origin() + remove_dot_segments(base_path + ref);
}

std::string canonicalize_url(std::string_view text) {
  Url u = parse_url(text);
  if ((u.scheme == "http" && u.port == 80) || (u.scheme == "https" && u.port == 443)) u.port = 0;
  const auto q = u.path.find('?');
  std::string path = u.path.substr(0, q);
  if (path.empty()) path = "/";
  std::string query;
  if (q != std::string::npos) {
    std::string_view params = std::string_view(u.path).substr(q + 1);
    while (!params.empty()) {
      const auto amp = params.find('&');
      const auto kv = params.substr(0, amp);
      params = amp == std::string_view::npos ? std::string_view{} : params.substr(amp + 1);
      if (kv.empty()) continue;
      const std::string key = lower(kv.substr(0, kv.find('=')));
      const bool tracking = key.rfind("utm_", 0) == 0 || key == "fbclid" || key == "gclid" || key == "dclid" ||
                            key == "mc_cid" || key == "mc_eid" || key == "igshid" || key == "_ga";
      if (tracking) continue;
      query += (query.empty() ? "?" : "&") + std::string(kv);
    }
  }
  return u.origin() + path + query;
}

std::string url_digest(std::string_view url) { return sha256_hex(canonicalize_url(url)); }

// --------------------------------------------------------------------- robots

namespace {

// Robots pattern match: '*' any run, trailing '$' anchors the end.
bool robots_match(std::string_view pattern, std::string_view path) {
  bool anchored = !pattern.empty() && pattern.back() == '$';
  if (anchored) pattern.remove_suffix(1);
  // Iterative wildcard match with backtracking to the last star.
  std::size_t p = 0, s = 0, star = std::string_view::npos, mark = 0;
  while (s < path.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = s;
    } else if (p < pattern.size() && pattern[p] == path[s]) {
      ++p;
      ++s;
    } else if (p == pattern.size() && !anchored) {
      return true;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      s = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

RobotsRules RobotsRules::parse(std::string_view text, std::string_view user_agent) {
  std::string token = lower(user_agent.substr(0, user_agent.find_first_of("/ ")));
  struct Group {
    std::vector<std::string> agents;
    std::vector<Rule> rules;
    std::optional<double> delay;
  };
  std::vector<Group> groups;
  bool in_agents = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view l = line;
    if (const auto h = l.find('#'); h != std::string_view::npos) l = l.substr(0, h);
    const auto colon = l.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string key = lower(trim(l.substr(0, colon)));
    const std::string value(trim(l.substr(colon + 1)));
    if (key == "user-agent") {
      if (!in_agents) groups.emplace_back();
      groups.back().agents.push_back(lower(value));
      in_agents = true;
      continue;
    }
    in_agents = false;
    if (groups.empty()) continue;
    if (key == "allow" || key == "disallow") {
      if (value.empty()) continue;
      groups.back().rules.push_back({value, key == "allow"});
    } else if (key == "crawl-delay") {
      double d = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
      if (ec == std::errc{}) groups.back().delay = d;
    }
  }
  RobotsRules out;
  std::size_t best = 0;
  bool found = false;
  for (const auto& g : groups) {
    for (const auto& a : g.agents) {
      std::size_t score = 0;
      if (a == "*") {
        score = 1;
      } else if (!token.empty() && token.find(a) != std::string::npos) {
        score = 1 + a.size();
      } else {
        continue;
      }
      if (score > best) {
        best = score;
        out.rules_ = g.rules;
        out.crawl_delay_ = g.delay;
        found = true;
      } else if (score == best && found) {
        out.rules_.insert(out.rules_.end(), g.rules.begin(), g.rules.end());
      }
    }
  }
  return out;
}

bool RobotsRules::allowed(std::string_view path) const {
  std::size_t best_len = 0;
  bool verdict = true;
  bool any = false;
  for (const auto& r : rules_) {
    if (!robots_match(r.pattern, path)) continue;
    const std::size_t len = r.pattern.size();
    if (!any || len > best_len || (len == best_len && r.allow)) {
      best_len = len;
      verdict = r.allow;
      any = true;
    }
  }
  return verdict;
}

}  // namespace newscheck
