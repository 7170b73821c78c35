#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "newscheck/ingest.hpp"

namespace newscheck {

RateLimiter::RateLimiter(double per_second) : rate_(per_second), next_(std::chrono::steady_clock::now()) {
  if (!(per_second > 0) || !std::isfinite(per_second)) {
    throw ValidationError("rate limit must be a positive number of requests per second");
  }
}

void RateLimiter::acquire() {
  // Holding the lock while sleeping keeps callers strictly in turn.
  std::lock_guard lock(mutex_);
  const auto now = std::chrono::steady_clock::now();
  if (next_ > now) std::this_thread::sleep_until(next_);
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / rate_));
  next_ = std::max(now, next_) + interval;
}

void to_json(nlohmann::json& j, const FetchPolicy& p) {
  j = nlohmann::json{{"timeout_s", p.timeout_s},           {"attempts", p.attempts},
                     {"backoff_s", p.backoff_s},           {"backoff_factor", p.backoff_factor},
                     {"user_agent", p.user_agent},         {"respect_robots", p.respect_robots},
                     {"max_bytes", p.max_bytes}};
}

void from_json(const nlohmann::json& j, FetchPolicy& p) {
  p.timeout_s = j.value("timeout_s", p.timeout_s);
  p.attempts = j.value("attempts", p.attempts);
  p.backoff_s = j.value("backoff_s", p.backoff_s);
  p.backoff_factor = j.value("backoff_factor", p.backoff_factor);
  p.user_agent = j.value("user_agent", p.user_agent);
  p.respect_robots = j.value("respect_robots", p.respect_robots);
  p.max_bytes = j.value("max_bytes", p.max_bytes);
  if (!(p.timeout_s > 0) || p.attempts < 1 || p.backoff_s < 0 || p.backoff_factor < 1 || p.max_bytes == 0) {
    throw ConfigError("invalid fetch policy");
  }
}

std::string_view to_string(FetchErrorKind kind) {
  switch (kind) {
    case FetchErrorKind::InvalidUrl:
      return "invalid_url";
    case FetchErrorKind::Disallowed:
      return "disallowed";
    case FetchErrorKind::Timeout:
      return "timeout";
    case FetchErrorKind::Network:
      return "network";
    case FetchErrorKind::Status:
      return "status";
    case FetchErrorKind::TooLarge:
      return "too_large";
  }
  return "network";
}

FetchError::FetchError(FetchErrorKind kind, const std::string& url, const std::string& detail, int status)
    : Error(std::string(to_string(kind)) + ": " + url + (detail.empty() ? "" : " (" + detail + ")")),
      kind_(kind),
      status_(status) {}

Fetcher::Fetcher(FetchPolicy policy) : policy_(std::move(policy)) {}

FetchResult Fetcher::get_once(const Url& url, RateLimiter& limiter) {
  limiter.acquire();
  ++requests_;
  httplib::Client client(url.origin());
  const auto seconds = static_cast<time_t>(policy_.timeout_s);
  const auto micros = static_cast<time_t>((policy_.timeout_s - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  client.set_follow_location(true);
  const httplib::Headers headers{{"User-Agent", policy_.user_agent}};

  bool too_large = false;
  const auto start = std::chrono::steady_clock::now();
  auto res = client.Get(url.path, headers, [&](uint64_t current, uint64_t total) {
    too_large = current > policy_.max_bytes || total > policy_.max_bytes;
    return !too_large;
  });
  const std::string target = url.str();
  if (!res) {
    if (too_large) throw FetchError(FetchErrorKind::TooLarge, target, "over " + std::to_string(policy_.max_bytes) + " bytes");
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || elapsed >= policy_.timeout_s) {
      throw FetchError(FetchErrorKind::Timeout, target, httplib::to_string(err));
    }
    throw FetchError(FetchErrorKind::Network, target, httplib::to_string(err));
  }
  if (res->body.size() > policy_.max_bytes) {
    throw FetchError(FetchErrorKind::TooLarge, target, "over " + std::to_string(policy_.max_bytes) + " bytes");
  }
  FetchResult out;
  out.status = res->status;
  out.content_type = res->get_header_value("Content-Type");
  out.body = std::move(res->body);
  return out;
}

const RobotsRules& Fetcher::robots_for(const Url& url, RateLimiter& limiter) {
  const std::string origin = url.origin();
  std::lock_guard lock(mutex_);
  if (auto it = robots_.find(origin); it != robots_.end()) return it->second;
  RobotsRules rules = RobotsRules::allow_all();
  Url robots_url = url;
  robots_url.path = "/robots.txt";
  try {
    FetchResult r = get_once(robots_url, limiter);
    if (r.status >= 200 && r.status < 300) {
      rules = RobotsRules::parse(r.body, policy_.user_agent);
    } else if (r.status >= 500) {
      // Server trouble: stay off the site until the next run.
      rules = RobotsRules::parse("User-agent: *\nDisallow: /\n", policy_.user_agent);
    }
    // Any 4xx means there are no rules.
  } catch (const FetchError& e) {
    if (e.kind() != FetchErrorKind::TooLarge) {
      rules = RobotsRules::parse("User-agent: *\nDisallow: /\n", policy_.user_agent);
    }
  }
  return robots_.emplace(origin, std::move(rules)).first->second;
}

FetchResult Fetcher::fetch(const std::string& url_text, RateLimiter& limiter) {
  Url url;
  try {
    url = parse_url(url_text);
  } catch (const ValidationError& e) {
    throw FetchError(FetchErrorKind::InvalidUrl, url_text, e.what());
  }
  const std::string target = url.str();
  if (policy_.respect_robots && !robots_for(url, limiter).allowed(url.path)) {
    throw FetchError(FetchErrorKind::Disallowed, target, "robots.txt");
  }
  double delay = policy_.backoff_s;
  for (int attempt = 1;; ++attempt) {
    try {
      FetchResult r = get_once(url, limiter);
      if (r.status < 200 || r.status >= 300) {
        throw FetchError(FetchErrorKind::Status, target, "HTTP " + std::to_string(r.status), r.status);
      }
      r.attempts = attempt;
      return r;
    } catch (FetchError& e) {
      e.attempts = attempt;
      if (e.kind() == FetchErrorKind::TooLarge || attempt >= policy_.attempts) throw;
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    delay *= policy_.backoff_factor;
  }
}

}  // namespace newscheck
