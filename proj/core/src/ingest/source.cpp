#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "newscheck/html.hpp"
#include "newscheck/ingest.hpp"
#include "newscheck/unicode.hpp"

namespace newscheck {

namespace {

std::string date_string(int y, int m, int d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

std::optional<std::string> checked(int y, int m, int d) {
  std::string s = date_string(y, m, d);
  if (y < 1000 || y > 9999 || !is_iso_date(s)) return std::nullopt;
  return s;
}

constexpr std::array<std::string_view, 12> kMonthsPt{"janeiro", "fevereiro", "marco",    "abril",
                                                      "maio",    "junho",     "julho",    "agosto",
                                                      "setembro", "outubro",  "novembro", "dezembro"};

}  // namespace

std::optional<std::string> normalize_date(std::string_view text) {
  const std::string s = unicode::to_lower(unicode::strip_accents(std::string(text)));
  std::smatch m;
  static const std::regex iso(R"((\d{4})-(\d{2})-(\d{2}))");
  static const std::regex dmy(R"((\d{1,2})[/.-](\d{1,2})[/.-](\d{4}))");
  static const std::regex spelled(R"((\d{1,2})\s*(?:de\s+)?([a-z]+)\.?\s*(?:de\s+)?(\d{4}))");
  if (std::regex_search(s, m, iso)) return checked(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]));
  if (std::regex_search(s, m, dmy)) return checked(std::stoi(m[3]), std::stoi(m[2]), std::stoi(m[1]));
  if (std::regex_search(s, m, spelled)) {
    const std::string month = m[2];
    for (std::size_t i = 0; i < kMonthsPt.size(); ++i) {
      // Full names and three-letter abbreviations.
      if (month == kMonthsPt[i] || (month.size() == 3 && kMonthsPt[i].substr(0, 3) == month)) {
        return checked(std::stoi(m[3]), static_cast<int>(i) + 1, std::stoi(m[1]));
      }
    }
  }
  return std::nullopt;
}

Article extract_article(std::string_view html_text, const Selectors& selectors) {
  const html::Document doc(html_text);
  Article a;
  const auto title = doc.select_first(selectors.title);
  if (!title) throw ExtractionError("title selector '" + selectors.title + "' matched nothing");
  a.title = doc.text(*title);
  if (a.title.empty()) throw ExtractionError("title is empty");

  std::string body;
  const auto matches = doc.select(selectors.body);
  const std::set<int> matched(matches.begin(), matches.end());
  for (int id : matches) {
    // Skip matches nested in an earlier match so text is not repeated.
    bool nested = false;
    for (int p = doc.node(id).parent; p >= 0 && !nested; p = doc.node(p).parent) nested = matched.count(p) > 0;
    if (nested) continue;
    const std::string t = doc.text(id);
    if (t.empty()) continue;
    if (!body.empty()) body += ' ';
    body += t;
  }
  if (body.empty()) throw ExtractionError("body selector '" + selectors.body + "' yielded no text");
  a.body = std::move(body);

  if (selectors.date) {
    if (const auto node = doc.select_first(*selectors.date)) {
      const auto& n = doc.node(*node);
      for (const char* attr : {"datetime", "content"}) {
        if (const auto* v = n.attribute(attr); v && !a.date) a.date = normalize_date(*v);
      }
      if (!a.date) a.date = normalize_date(doc.text(*node));
    }
  }
  return a;
}

std::vector<std::string> extract_links(std::string_view html_text, const std::string& selector,
                                       const std::string& base_url) {
  const html::Document doc(html_text);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (int id : doc.select(selector)) {
    const auto* href = doc.node(id).attribute("href");
    if (!href || href->empty() || href->front() == '#') continue;
    std::string url;
    try {
      url = resolve_url(base_url, *href);
      url = url.substr(0, url.find('#'));
      if (!seen.insert(canonicalize_url(url)).second) continue;
    } catch (const ValidationError&) {
      continue;  // mailto:, javascript: and the like
    }
    out.push_back(url);
  }
  return out;
}

// ------------------------------------------------------------------ registry

std::string_view to_string(Credibility c) { return c == Credibility::Credulous ? "credulous" : "doubtful"; }

Credibility parse_credibility(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "credulous") return Credibility::Credulous;
  if (s == "doubtful") return Credibility::Doubtful;
  throw ConfigError("unknown credibility '" + std::string(text) + "'");
}

void to_json(nlohmann::json& j, const SourceSpec& s) {
  nlohmann::json sel{{"title", s.selectors.title}, {"body", s.selectors.body}};
  if (s.selectors.date) sel["date"] = *s.selectors.date;
  if (s.selectors.links) sel["links"] = *s.selectors.links;
  j = nlohmann::json{{"name", s.name},
                     {"credibility", std::string(to_string(s.credibility))},
                     {"seed_urls", s.seed_urls},
                     {"selectors", sel},
                     {"rate_limit", s.rate_limit}};
}

void from_json(const nlohmann::json& j, SourceSpec& s) {
  s.name = j.at("name").get<std::string>();
  s.credibility = parse_credibility(j.at("credibility").get<std::string>());
  s.seed_urls = j.at("seed_urls").get<std::vector<std::string>>();
  const auto& sel = j.at("selectors");
  s.selectors.title = sel.at("title").get<std::string>();
  s.selectors.body = sel.at("body").get<std::string>();
  s.selectors.date.reset();
  s.selectors.links.reset();
  if (sel.contains("date")) s.selectors.date = sel.at("date").get<std::string>();
  if (sel.contains("links")) s.selectors.links = sel.at("links").get<std::string>();
  s.rate_limit = j.value("rate_limit", 1.0);
}

const SourceSpec& SourceRegistry::find(const std::string& name) const {
  for (const auto& s : sources) {
    if (s.name == name) return s;
  }
  throw ConfigError("no source named '" + name + "' in registry");
}

SourceRegistry parse_source_registry(const nlohmann::json& j) {
  SourceRegistry reg;
  try {
    if (j.contains("fetch")) reg.fetch = j.at("fetch").get<FetchPolicy>();
    reg.sources = j.at("sources").get<std::vector<SourceSpec>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed source registry: ") + e.what());
  }
  std::set<std::string> names;
  for (const auto& s : reg.sources) {
    if (s.name.empty()) throw ConfigError("source with empty name");
    if (!names.insert(s.name).second) throw ConfigError("duplicate source name '" + s.name + "'");
    if (!(s.rate_limit > 0)) throw ConfigError("source '" + s.name + "' needs a positive rate_limit");
    if (s.seed_urls.empty()) throw ConfigError("source '" + s.name + "' has no seed urls");
    for (const auto& u : s.seed_urls) {
      try {
        parse_url(u);
      } catch (const ValidationError& e) {
        throw ConfigError("source '" + s.name + "': " + e.what());
      }
    }
    // Surface selector typos at load time rather than mid-crawl.
    try {
      const html::Document probe("<html></html>");
      probe.select(s.selectors.title);
      probe.select(s.selectors.body);
      if (s.selectors.date) probe.select(*s.selectors.date);
      if (s.selectors.links) probe.select(*s.selectors.links);
    } catch (const ValidationError& e) {
      throw ConfigError("source '" + s.name + "': " + e.what());
    }
  }
  return reg;
}

SourceRegistry load_source_registry(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read source registry '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("source registry '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_source_registry(j);
}

// -------------------------------------------------------------------- ingest

Document make_bank_document(const std::string& source, const std::string& url, const Article& article) {
  Document d;
  d.id = url_digest(url);
  d.text = article.title + "\n" + article.body;
  d.label = Label::Unknown;
  d.source = source;
  d.url = canonicalize_url(url);
  d.published_at = article.date;
  return d;
}

IngestReport ingest_source(const SourceSpec& spec, NewsBank& bank, std::size_t limit, Fetcher& fetcher) {
  IngestReport report;
  RateLimiter limiter(spec.rate_limit);
  auto fail = [&](const std::string& what) {
    ++report.failures;
    ++report.fetched;
    report.errors.push_back(what);
  };

  // Candidate article URLs: the seeds themselves, or what their listings link to.
  std::vector<std::string> candidates;
  if (spec.selectors.links) {
    for (const auto& seed : spec.seed_urls) {
      try {
        const auto page = fetcher.fetch(seed, limiter);
        for (auto& u : extract_links(page.body, *spec.selectors.links, seed)) candidates.push_back(std::move(u));
      } catch (const FetchError& e) {
        fail(e.what());
      }
    }
  } else {
    candidates = spec.seed_urls;
  }

  std::set<std::string> visited;
  for (const auto& url : candidates) {
    if (report.stored >= limit) break;
    std::string canonical;
    try {
      canonical = canonicalize_url(url);
    } catch (const ValidationError& e) {
      fail(e.what());
      continue;
    }
    if (!visited.insert(canonical).second) continue;
    if (bank.contains_url(canonical)) {
      ++report.fetched;
      ++report.duplicates;
      continue;
    }
    Article article;
    try {
      const auto page = fetcher.fetch(url, limiter);
      article = extract_article(page.body, spec.selectors);
    } catch (const FetchError& e) {
      fail(e.what());
      continue;
    } catch (const ExtractionError& e) {
      fail(url + ": " + e.what());
      continue;
    }
    ++report.fetched;
    try {
      if (bank.append(make_bank_document(spec.name, url, article))) {
        ++report.stored;
      } else {
        ++report.duplicates;
      }
    } catch (const Error& e) {
      // The page was fetched but could not be kept.
      ++report.failures;
      report.errors.push_back(e.what());
      report.aborted = true;
      break;
    }
  }
  return report;
}

}  // namespace newscheck
