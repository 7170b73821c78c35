#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "newscheck/corpus.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

// ---------------------------------------------------------------------- urls

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;    // lowercase
  int port = 0;        // 0 when implicit
  std::string path;    // begins with '/', includes the query string
  std::string fragment;

  std::string origin() const;  // scheme://host[:port]
  std::string str() const;     // without the fragment
};

/// Throws ValidationError unless `text` is an absolute http(s) URL.
Url parse_url(std::string_view text);
/// Resolves `ref` against `base` (absolute, root-relative, or path-relative).
std::string resolve_url(const std::string& base, const std::string& ref);
/// Lowercase scheme and host, default port dropped, fragment and tracking
/// parameters (utm_*, fbclid, gclid, ...) removed.
std::string canonicalize_url(std::string_view url);
/// Hex SHA-256 of the canonical URL.
std::string url_digest(std::string_view url);

// -------------------------------------------------------------------- robots

/// Robots exclusion rules for one user agent: the most specific matching group,
/// longest matching path rule wins, Allow wins ties. Supports '*' and '$'.
class RobotsRules {
 public:
  static RobotsRules parse(std::string_view text, std::string_view user_agent);
  static RobotsRules allow_all() { return {}; }

  bool allowed(std::string_view path) const;
  std::optional<double> crawl_delay() const { return crawl_delay_; }

 private:
  struct Rule {
    std::string pattern;
    bool allow;
  };
  std::vector<Rule> rules_;
  std::optional<double> crawl_delay_;
};

// ------------------------------------------------------------------ fetching

/// Spaces calls at least 1/rate seconds apart. Thread-safe.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second);
  void acquire();
  double rate() const { return rate_; }

 private:
  double rate_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point next_;
};

struct FetchPolicy {
  double timeout_s = 10.0;
  int attempts = 3;
  double backoff_s = 0.5;
  double backoff_factor = 2.0;
  std::string user_agent = "newscheck/0.1 (+research crawler)";
  bool respect_robots = true;
  std::size_t max_bytes = 8 * 1024 * 1024;
};

void to_json(nlohmann::json& j, const FetchPolicy& p);
void from_json(const nlohmann::json& j, FetchPolicy& p);

enum class FetchErrorKind { InvalidUrl, Disallowed, Timeout, Network, Status, TooLarge };
std::string_view to_string(FetchErrorKind kind);

class FetchError : public Error {
 public:
  FetchError(FetchErrorKind kind, const std::string& url, const std::string& detail, int status = 0);
  FetchErrorKind kind() const { return kind_; }
  int status() const { return status_; }
  int attempts = 0;

 private:
  FetchErrorKind kind_;
  int status_;
};

struct FetchResult {
  std::string body;
  std::string content_type;
  int status = 0;
  int attempts = 0;
};

/// HTTP(S) GET with robots.txt caching per origin and retry with exponential
/// backoff. Disallowed and malformed URLs fail without any request.
class Fetcher {
 public:
  explicit Fetcher(FetchPolicy policy = {});

  FetchResult fetch(const std::string& url, RateLimiter& limiter);
  const FetchPolicy& policy() const { return policy_; }
  /// Requests issued so far (robots.txt included).
  std::size_t requests() const { return requests_; }

 private:
  const RobotsRules& robots_for(const Url& url, RateLimiter& limiter);
  FetchResult get_once(const Url& url, RateLimiter& limiter);

  FetchPolicy policy_;
  std::mutex mutex_;
  std::map<std::string, RobotsRules> robots_;
  std::atomic<std::size_t> requests_{0};
};

// ---------------------------------------------------------------- extraction

class ExtractionError : public InputError {
 public:
  using InputError::InputError;
};

struct Selectors {
  std::string title;
  std::string body;
  std::optional<std::string> date;
  /// On listing pages: anchors whose href lead to articles.
  std::optional<std::string> links;
};

struct Article {
  std::string title;
  std::string body;
  std::optional<std::string> date;  // YYYY-MM-DD when recognizable
};

/// Throws ExtractionError when the title selector misses or the body is empty.
Article extract_article(std::string_view html, const Selectors& selectors);
/// href targets of `selector` matches, resolved against `base_url`, deduplicated in order.
std::vector<std::string> extract_links(std::string_view html, const std::string& selector, const std::string& base_url);
/// "2021-03-04", "2021-03-04T10:00:00Z", "04/03/2021" -> "2021-03-04".
std::optional<std::string> normalize_date(std::string_view text);

// ------------------------------------------------------------------ registry

enum class Credibility { Doubtful, Credulous };
std::string_view to_string(Credibility c);
Credibility parse_credibility(std::string_view text);

struct SourceSpec {
  std::string name;
  Credibility credibility = Credibility::Doubtful;
  std::vector<std::string> seed_urls;
  Selectors selectors;
  double rate_limit = 1.0;
};

void to_json(nlohmann::json& j, const SourceSpec& s);
void from_json(const nlohmann::json& j, SourceSpec& s);

struct SourceRegistry {
  std::vector<SourceSpec> sources;
  FetchPolicy fetch;

  const SourceSpec& find(const std::string& name) const;
};

/// {"fetch": {...}, "sources": [...]}. Names must be unique and rate limits positive.
SourceRegistry parse_source_registry(const nlohmann::json& j);
SourceRegistry load_source_registry(const std::filesystem::path& path);

// ------------------------------------------------------------------ news bank

/// Append-only JSONL of unlabeled documents keyed by URL digest.
class NewsBank {
 public:
  /// Creates the file when absent; throws InputError when existing content is invalid.
  static NewsBank open(const std::filesystem::path& path);

  bool contains_url(std::string_view url) const;
  /// Appends unless the URL digest is already present. Returns false for duplicates.
  /// Writes are serialized; throws InputError on I/O failure.
  bool append(const Document& doc);
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }
  Corpus load() const;

 private:
  std::filesystem::path path_;
  std::unordered_set<std::string> digests_;
  mutable std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

/// Document for a fetched article: id = URL digest, text = title line + body.
Document make_bank_document(const std::string& source, const std::string& url, const Article& article);

struct IngestReport {
  std::size_t fetched = 0;
  std::size_t stored = 0;
  std::size_t duplicates = 0;
  std::size_t failures = 0;
  bool aborted = false;
  std::vector<std::string> errors;
};

/// Visits the source's seeds (and, with a links selector, the articles they list)
/// until `limit` new records are stored. fetched = stored + duplicates + failures.
IngestReport ingest_source(const SourceSpec& spec, NewsBank& bank, std::size_t limit, Fetcher& fetcher);

}  // namespace newscheck
