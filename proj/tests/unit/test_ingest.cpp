#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "newscheck/html.hpp"
#include "newscheck/ingest.hpp"
#include "site_server.hpp"
#include "test_util.hpp"

using namespace newscheck;

namespace {

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) s.replace(pos, from.size(), to);
}

// Serves every fixture site on its own port and loads the registry against them.
struct Sites {
  testutil::SiteServer diario{testutil::fixture("sites/diario")};
  testutil::SiteServer boatos{testutil::fixture("sites/boatos")};
  testutil::SiteServer misto{testutil::fixture("sites/misto")};
  testutil::SiteServer dez{testutil::fixture("sites/dez")};
  SourceRegistry registry;

  Sites() {
    std::string text = read(testutil::fixture("sources.json"));
    replace_all(text, "{{diario}}", diario.base());
    replace_all(text, "{{boatos}}", boatos.base());
    replace_all(text, "{{misto}}", misto.base());
    replace_all(text, "{{dez}}", dez.base());
    registry = parse_source_registry(nlohmann::json::parse(text));
  }
};

std::size_t distinct_digests(const Corpus& bank) {
  std::set<std::string> d;
  for (const auto& doc : bank.documents()) d.insert(url_digest(*doc.url));
  return d.size();
}

}  // namespace

TEST(Urls, ParseResolveCanonicalize) {
  const Url u = parse_url("HTTPS://Exemplo.COM.br:8443/a/b?x=1#frag");
  EXPECT_EQ(u.scheme, "https");
  EXPECT_EQ(u.host, "exemplo.com.br");
  EXPECT_EQ(u.port, 8443);
  EXPECT_EQ(u.path, "/a/b?x=1");
  EXPECT_EQ(u.fragment, "frag");
  EXPECT_EQ(parse_url("http://x.com").path, "/");
  EXPECT_THROW(parse_url("ftp://x.com/"), ValidationError);
  EXPECT_THROW(parse_url("/relative"), ValidationError);
  EXPECT_THROW(parse_url("http://x.com:99999/"), ValidationError);

  const std::string base = "http://x.com/dir/page.html?q=1";
  EXPECT_EQ(resolve_url(base, "other.html"), "http://x.com/dir/other.html");
  EXPECT_EQ(resolve_url(base, "../up.html"), "http://x.com/up.html");
  EXPECT_EQ(resolve_url(base, "/root.html"), "http://x.com/root.html");
  EXPECT_EQ(resolve_url(base, "//cdn.com/a"), "http://cdn.com/a");
  EXPECT_EQ(resolve_url(base, "?p=2"), "http://x.com/dir/page.html?p=2");
  EXPECT_EQ(resolve_url(base, "https://y.org/z"), "https://y.org/z");

  EXPECT_EQ(canonicalize_url("HTTP://WWW.X.com:80/a?utm_source=tw&id=3&fbclid=zz#top"), "http://www.x.com/a?id=3");
  EXPECT_EQ(canonicalize_url("https://x.com:443"), "https://x.com/");
  EXPECT_EQ(url_digest("http://x.com/a?utm_medium=m"), url_digest("http://X.com/a#c"));
  EXPECT_NE(url_digest("http://x.com/a"), url_digest("http://x.com/b"));
  EXPECT_EQ(url_digest("http://x.com/a").size(), 64u);
}

TEST(Robots, LongestMatchWins) {
  const auto r = RobotsRules::parse(
      "# comment\nUser-agent: *\nDisallow: /private/\nAllow: /private/open\nDisallow: /*.pdf$\nCrawl-delay: 2\n",
      "newscheck/0.1");
  EXPECT_TRUE(r.allowed("/"));
  EXPECT_FALSE(r.allowed("/private/x"));
  EXPECT_TRUE(r.allowed("/private/open/y"));
  EXPECT_FALSE(r.allowed("/docs/a.pdf"));
  EXPECT_TRUE(r.allowed("/docs/a.pdf?x=1"));
  EXPECT_EQ(r.crawl_delay().value(), 2.0);
  const auto tie = RobotsRules::parse("User-agent: *\nDisallow: /a\nAllow: /a\n", "bot");
  EXPECT_TRUE(tie.allowed("/a"));
  const auto empty = RobotsRules::parse("User-agent: *\nDisallow:\n", "bot");
  EXPECT_TRUE(empty.allowed("/anything"));
}

TEST(Robots, SpecificGroupBeatsWildcard) {
  const std::string text = "User-agent: *\nDisallow: /\n\nUser-agent: NewsCheck\nUser-agent: other\nDisallow: /x\n";
  const auto mine = RobotsRules::parse(text, "newscheck/0.1 (+research)");
  EXPECT_TRUE(mine.allowed("/y"));
  EXPECT_FALSE(mine.allowed("/x"));
  const auto theirs = RobotsRules::parse(text, "somebot/1.0");
  EXPECT_FALSE(theirs.allowed("/y"));
  EXPECT_TRUE(RobotsRules::allow_all().allowed("/x"));
}

TEST(RateLimit, SpacesCalls) {
  RateLimiter limiter(20.0);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 4; ++i) limiter.acquire();
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(elapsed, 0.149);
  EXPECT_THROW(RateLimiter(0.0), ValidationError);
}

TEST(Html, SelectorsAndText) {
  const html::Document doc(
      "<div id=main class='a b'><p>Um <b>dois</b></p><ul><li>tres<li>quatro</ul>"
      "<a href=\"/x\" data-k=\"v w\">link</a></div><p class=b>cinco &eacute;</p><script>x<y</script>");
  EXPECT_EQ(doc.select("p").size(), 2u);
  EXPECT_EQ(doc.select("div p").size(), 1u);
  EXPECT_EQ(doc.select("#main > p").size(), 1u);
  EXPECT_EQ(doc.select(".b").size(), 2u);
  EXPECT_EQ(doc.select("div.a.b").size(), 1u);
  EXPECT_EQ(doc.select("li").size(), 2u);
  EXPECT_EQ(doc.select("a[href^='/']").size(), 1u);
  EXPECT_EQ(doc.select("a[data-k~=w]").size(), 1u);
  EXPECT_EQ(doc.select("a[href$=y]").size(), 0u);
  EXPECT_EQ(doc.select("li, p").size(), 4u);
  EXPECT_EQ(doc.text(*doc.select_first("#main")), "Um dois tres quatro link");
  EXPECT_EQ(doc.text(doc.root()), "Um dois tres quatro link cinco é");
  EXPECT_THROW(doc.select("p[unterminated"), ValidationError);
  EXPECT_EQ(html::decode_entities("&lt;a&gt; &#x41;&#66; &nbsp;&bogus;"), "<a> AB  &bogus;");
}

TEST(Extract, FixturePageExactStrings) {
  const Article a = extract_article(read(testutil::fixture("sites/pagina.html")),
                                    {"h1.headline", "div.content p", "meta[itemprop=datePublished]", {}});
  EXPECT_EQ(a.title, "Ministro nega boato sobre vacinas");
  EXPECT_EQ(a.body, "Primeiro parágrafo, com link e espaços. Segundo parágrafo & fim. Nova linha");
  EXPECT_EQ(a.date.value(), "2020-11-05");
}

TEST(Extract, MissingPartsAreErrors) {
  const std::string page = read(testutil::fixture("sites/misto/n/3.html"));
  EXPECT_THROW(extract_article(page, {"h1.headline", "div.content p", {}, {}}), ExtractionError);
  EXPECT_THROW(extract_article(page, {"h2.none", "div.content", {}, {}}), ExtractionError);
  // The container selector still carries no text.
  EXPECT_THROW(extract_article(page, {"h1.headline", "div.content", {}, {}}), ExtractionError);
}

TEST(Extract, DatesAndLinks) {
  EXPECT_EQ(normalize_date("2021-03-04T10:00:00Z").value(), "2021-03-04");
  EXPECT_EQ(normalize_date("Publicado em 04/03/2021 às 10h").value(), "2021-03-04");
  EXPECT_EQ(normalize_date("4 de março de 2021").value(), "2021-03-04");
  EXPECT_EQ(normalize_date("12 dez. 2020").value(), "2020-12-12");
  EXPECT_FALSE(normalize_date("31/02/2021"));
  EXPECT_FALSE(normalize_date("ontem"));
  const auto links = extract_links(read(testutil::fixture("sites/diario/index.html")), "a.story", "http://h/index.html");
  ASSERT_EQ(links.size(), 5u);  // the tracking-parameter duplicate collapses
  EXPECT_EQ(links[0], "http://h/noticias/1.html");
}

TEST(Fetch, DeliversBodyAndContentType) {
  testutil::SiteServer site(testutil::fixture("sites/diario"));
  Fetcher fetcher;
  RateLimiter limiter(1000);
  const FetchResult r = fetcher.fetch(site.base() + "/noticias/2.html", limiter);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_NE(r.content_type.find("text/html"), std::string::npos);
  EXPECT_EQ(r.body, read(testutil::fixture("sites/diario/noticias/2.html")));
  EXPECT_EQ(site.hits("/robots.txt"), 1);
  fetcher.fetch(site.base() + "/noticias/3.html", limiter);
  EXPECT_EQ(site.hits("/robots.txt"), 1);  // cached per origin
}

TEST(Fetch, NotFoundIsRetriedThenReported) {
  testutil::SiteServer site(testutil::fixture("sites/dez"));
  FetchPolicy policy;
  policy.backoff_s = 0.01;
  Fetcher fetcher(policy);
  RateLimiter limiter(1000);
  try {
    fetcher.fetch(site.base() + "/missing.html", limiter);
    FAIL();
  } catch (const FetchError& e) {
    EXPECT_EQ(e.kind(), FetchErrorKind::Status);
    EXPECT_EQ(e.status(), 404);
    EXPECT_EQ(e.attempts, 3);
  }
  EXPECT_EQ(site.hits("/missing.html"), 3);
}

TEST(Fetch, RobotsDisallowIssuesNoRequest) {
  testutil::SiteServer site(testutil::fixture("sites/boatos"));
  Fetcher fetcher;
  RateLimiter limiter(1000);
  try {
    fetcher.fetch(site.base() + "/privado/1.html", limiter);
    FAIL();
  } catch (const FetchError& e) {
    EXPECT_EQ(e.kind(), FetchErrorKind::Disallowed);
    EXPECT_EQ(e.attempts, 0);
  }
  EXPECT_EQ(site.hits("/privado/1.html"), 0);
  EXPECT_THROW(fetcher.fetch("not a url", limiter), FetchError);
}

TEST(Fetch, TimeoutAndSizeCap) {
  testutil::SiteServer site({}, [](httplib::Server& s) {
    s.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(1500));
      res.set_content("late", "text/plain");
    });
    s.Get("/big", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string(5000, 'x'), "text/plain");
    });
  });
  FetchPolicy policy;
  policy.timeout_s = 0.3;
  policy.attempts = 2;
  policy.backoff_s = 0.01;
  policy.max_bytes = 1000;
  policy.respect_robots = false;
  Fetcher fetcher(policy);
  RateLimiter limiter(1000);
  try {
    fetcher.fetch(site.base() + "/slow", limiter);
    FAIL();
  } catch (const FetchError& e) {
    EXPECT_EQ(e.kind(), FetchErrorKind::Timeout) << e.what();
    EXPECT_EQ(e.attempts, 2);
  }
  try {
    fetcher.fetch(site.base() + "/big", limiter);
    FAIL();
  } catch (const FetchError& e) {
    EXPECT_EQ(e.kind(), FetchErrorKind::TooLarge);
    EXPECT_EQ(e.attempts, 1);
  }
}

TEST(NewsBankTest, AppendDeduplicatesAndPersists) {
  testutil::TempDir dir;
  const auto path = dir / "bank" / "bank.jsonl";
  NewsBank bank = NewsBank::open(path);
  const Document d = make_bank_document("fonte", "http://x.com/a?utm_source=z", {"Título", "Corpo", "2021-01-02"});
  EXPECT_EQ(d.text, "Título\nCorpo");
  EXPECT_EQ(d.url.value(), "http://x.com/a");
  EXPECT_TRUE(bank.append(d));
  EXPECT_FALSE(bank.append(make_bank_document("fonte", "http://X.com/a#frag", {"t", "b", {}})));
  EXPECT_TRUE(bank.contains_url("http://x.com/a"));
  EXPECT_EQ(bank.size(), 1u);
  Document labeled = d;
  labeled.label = Label::Fake;
  EXPECT_THROW(bank.append(labeled), ValidationError);

  const NewsBank reopened = NewsBank::open(path);
  EXPECT_EQ(reopened.size(), 1u);
  EXPECT_EQ(load_jsonl(path)[0], d);

  std::ofstream(dir / "bad.jsonl") << "{\"id\":\"a\",\"text\":\"t\",\"label\":\"unknown\"}\n";
  EXPECT_THROW(NewsBank::open(dir / "bad.jsonl"), InputError);
}

TEST(Registry, Validation) {
  const auto good = nlohmann::json::parse(R"({"sources": [{"name": "a", "credibility": "Credulous",
      "seed_urls": ["http://a.com/"], "selectors": {"title": "h1", "body": "p"}}]})");
  const SourceRegistry r = parse_source_registry(good);
  EXPECT_EQ(r.find("a").credibility, Credibility::Credulous);
  EXPECT_EQ(r.find("a").rate_limit, 1.0);
  EXPECT_THROW(r.find("b"), ConfigError);
  nlohmann::json j = r.sources[0];
  EXPECT_EQ(j.get<SourceSpec>().name, "a");

  auto dup = good;
  dup["sources"].push_back(good["sources"][0]);
  EXPECT_THROW(parse_source_registry(dup), ConfigError);
  auto rate = good;
  rate["sources"][0]["rate_limit"] = 0;
  EXPECT_THROW(parse_source_registry(rate), ConfigError);
  auto sel = good;
  sel["sources"][0]["selectors"]["body"] = "p[";
  EXPECT_THROW(parse_source_registry(sel), ConfigError);
  auto cred = good;
  cred["sources"][0]["credibility"] = "trusted";
  EXPECT_THROW(parse_source_registry(cred), ConfigError);
  EXPECT_THROW(load_source_registry("/nonexistent.json"), ConfigError);
}

TEST(Ingest, StoresThenDeduplicatesOnSecondRun) {
  Sites sites;
  testutil::TempDir dir;
  NewsBank bank = NewsBank::open(dir / "bank.jsonl");
  Fetcher fetcher(sites.registry.fetch);
  const auto& spec = sites.registry.find("diario");

  const IngestReport first = ingest_source(spec, bank, 100, fetcher);
  EXPECT_EQ(first.stored, 5u);
  EXPECT_EQ(first.failures, 0u);
  EXPECT_EQ(first.fetched, first.stored + first.duplicates + first.failures);
  const std::string before = read(dir / "bank.jsonl");
  const int article_hits = sites.diario.hits("/noticias/1.html");

  const IngestReport second = ingest_source(spec, bank, 100, fetcher);
  EXPECT_EQ(second.stored, 0u);
  EXPECT_EQ(second.duplicates, 5u);
  EXPECT_EQ(second.fetched, second.stored + second.duplicates + second.failures);
  EXPECT_EQ(read(dir / "bank.jsonl"), before);
  EXPECT_EQ(sites.diario.hits("/noticias/1.html"), article_hits);

  const Corpus stored = load_jsonl(dir / "bank.jsonl");
  EXPECT_EQ(stored.size(), distinct_digests(stored));
  for (const auto& d : stored.documents()) {
    EXPECT_EQ(d.source.value(), "diario");
    EXPECT_EQ(d.label, Label::Unknown);
    EXPECT_TRUE(d.published_at.has_value());
  }
  EXPECT_EQ(stored[0].published_at.value(), "2021-03-01");
}

TEST(Ingest, RobotsAndMalformedPagesAreFailures) {
  Sites sites;
  testutil::TempDir dir;
  NewsBank bank = NewsBank::open(dir / "bank.jsonl");
  Fetcher fetcher(sites.registry.fetch);

  const IngestReport doubtful = ingest_source(sites.registry.find("boatos"), bank, 100, fetcher);
  EXPECT_EQ(doubtful.stored, 5u);
  EXPECT_EQ(doubtful.failures, 1u);
  EXPECT_EQ(sites.boatos.hits("/privado/1.html"), 0);

  const IngestReport mixed = ingest_source(sites.registry.find("misto"), bank, 100, fetcher);
  EXPECT_EQ(mixed.stored, 3u);
  EXPECT_EQ(mixed.failures, 1u);
  EXPECT_EQ(mixed.fetched, 4u);
  EXPECT_EQ(bank.size(), 8u);
  EXPECT_EQ(load_jsonl(dir / "bank.jsonl").size(), 8u);
}

TEST(Ingest, LimitCapsNewRecords) {
  Sites sites;
  testutil::TempDir dir;
  NewsBank bank = NewsBank::open(dir / "bank.jsonl");
  Fetcher fetcher(sites.registry.fetch);
  const IngestReport r = ingest_source(sites.registry.find("dez"), bank, 5, fetcher);
  EXPECT_EQ(r.stored, 5u);
  EXPECT_EQ(bank.size(), 5u);
  const IngestReport rest = ingest_source(sites.registry.find("dez"), bank, 100, fetcher);
  EXPECT_EQ(rest.stored, 5u);
  EXPECT_EQ(rest.duplicates, 5u);
}

TEST(Ingest, StorageFailureAbortsWithPartialReport) {
  Sites sites;
  testutil::TempDir dir;
  const auto path = dir / "bank.jsonl";
  NewsBank bank = NewsBank::open(path);
  std::filesystem::remove(path);
  std::filesystem::create_directory(path);  // appends now fail
  Fetcher fetcher(sites.registry.fetch);
  const IngestReport r = ingest_source(sites.registry.find("dez"), bank, 100, fetcher);
  EXPECT_TRUE(r.aborted);
  EXPECT_EQ(r.stored, 0u);
  EXPECT_EQ(r.failures, 1u);
  EXPECT_EQ(r.fetched, r.stored + r.duplicates + r.failures);
}
