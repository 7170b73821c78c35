#include <fstream>

#include <gtest/gtest.h>

#include "folds.hpp"
#include "newscheck/corpus.hpp"
#include "newscheck/error.hpp"
#include "newscheck/random.hpp"
#include "test_util.hpp"

using namespace newscheck;

namespace {

void write(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

Corpus labeled(std::size_t n_fake, std::size_t n_true, std::size_t n_unknown = 0) {
  std::vector<Document> docs;
  std::size_t id = 0;
  auto add = [&](Label l, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) docs.push_back({"d" + std::to_string(id++), "texto", l, {}, {}, {}});
  };
  add(Label::Fake, n_fake);
  add(Label::True, n_true);
  add(Label::Unknown, n_unknown);
  return Corpus(std::move(docs));
}

}  // namespace

TEST(Corpus, JsonlRoundTrip) {
  const std::string content =
      R"({"id":"a","text":"Notícia falsa","label":"fake","source":"x.com","url":"https://x.com/1","published_at":"2020-02-29"})"
      "\n"
      R"({"id":"b","text":"Notícia real","label":"true"})"
      "\n\n"
      R"({"id":"c","text":"","label":"unknown"})"
      "\n";
  const Corpus c = parse_jsonl(content);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].source.value(), "x.com");
  EXPECT_EQ(c[0].published_at.value(), "2020-02-29");
  EXPECT_EQ(c.count(Label::Fake), 1u);
  EXPECT_EQ(c.count(Label::Unknown), 1u);
  EXPECT_EQ(parse_jsonl(to_jsonl(c)), c);

  testutil::TempDir dir;
  save_jsonl(c, dir / "c.jsonl");
  EXPECT_EQ(load_jsonl(dir / "c.jsonl"), c);
}

TEST(Corpus, JsonlErrorsNameTheLine) {
  try {
    parse_jsonl("{\"id\":\"a\",\"text\":\"t\",\"label\":\"fake\"}\n{\"id\":\"a\",\"text\":\"t\",\"label\":\"true\"}\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_jsonl("{\"id\":\"a\",\"text\":\"t\",\"label\":\"maybe\"}"), InputError);
  EXPECT_THROW(parse_jsonl("{\"id\":\"a\",\"text\":\"\",\"label\":\"fake\"}"), InputError);
  EXPECT_THROW(parse_jsonl("{\"id\":\"a\",\"label\":\"fake\"}"), InputError);
  EXPECT_THROW(parse_jsonl("{\"id\":\"a\",\"text\":\"t\",\"label\":\"fake\",\"published_at\":\"2021-02-30\"}"),
               InputError);
  EXPECT_THROW(parse_jsonl("not json"), InputError);
  EXPECT_THROW(load_jsonl("/nonexistent/file.jsonl"), InputError);
}

TEST(Corpus, IsoDates) {
  EXPECT_TRUE(is_iso_date("2024-02-29"));
  EXPECT_FALSE(is_iso_date("2023-02-29"));
  EXPECT_FALSE(is_iso_date("1900-02-29"));
  EXPECT_TRUE(is_iso_date("2000-02-29"));
  EXPECT_FALSE(is_iso_date("2021-13-01"));
  EXPECT_FALSE(is_iso_date("2021-1-01"));
  EXPECT_FALSE(is_iso_date("2021-01-01T00"));
}

TEST(Corpus, FakeBrLayout) {
  testutil::TempDir dir;
  const auto base = dir.path() / "full_texts";
  write(base / "fake" / "1.txt", "Manchete falsa\nCorpo da notícia falsa.\n");
  write(base / "fake" / "2.txt", "Outra manchete\nMais texto.");
  write(base / "fake" / "notes.md", "ignored");
  write(base / "fake" / "x.txt", "non numeric");
  write(base / "true" / "1.txt", "Manchete real\nCorpo real.");
  write(base / "true" / "3.txt", "   \n");
  write(base / "true-meta-information" / "1-meta.txt",
        "autor\nhttps://www.exemplo.com.br/politica/1\npolitica\n2017-03-04\n");

  FakeBrImport body_only = load_fakebr(dir.path());
  ASSERT_EQ(body_only.corpus.size(), 3u);
  EXPECT_EQ(body_only.skipped, 2u);  // x.txt and the blank file
  EXPECT_EQ(body_only.corpus[0].id, "fake-1");
  EXPECT_EQ(body_only.corpus[0].text, "Corpo da notícia falsa.");
  EXPECT_EQ(body_only.corpus[2].source.value(), "exemplo.com.br");
  EXPECT_EQ(body_only.corpus[2].published_at.value(), "2017-03-04");

  FakeBrImport with_title = load_fakebr(base, {.include_title = true});
  EXPECT_EQ(with_title.corpus[0].text, "Manchete falsa\nCorpo da notícia falsa.");
  EXPECT_THROW(load_fakebr(dir.path() / "missing"), InputError);
}

TEST(Corpus, SubsetAndLabeledIndices) {
  const Corpus c = labeled(2, 3, 2);
  EXPECT_EQ(c.labeled_indices().size(), 5u);
  const std::vector<std::size_t> pick{4, 0};
  const Corpus s = c.subset(pick);
  EXPECT_EQ(s[0].id, "d4");
  EXPECT_EQ(s[1].id, "d0");
  EXPECT_THROW(Corpus({{"a", "x", Label::Fake, {}, {}, {}}, {"a", "y", Label::True, {}, {}, {}}}), InputError);
}

TEST(Folds, DeterministicForSeed) {
  const Corpus c = labeled(37, 41, 5);
  const auto a = stratified_kfold(c, 5, 7);
  const auto b = stratified_kfold(c, 5, 7);
  const auto d = stratified_kfold(c, 5, 8);
  EXPECT_EQ(a.fold_by_index, b.fold_by_index);
  EXPECT_NE(a.fold_by_index, d.fold_by_index);
  EXPECT_EQ(a.fold_by_index[80], -1);
  EXPECT_THROW(stratified_kfold(labeled(3, 10), 5, 1), ValidationError);
  EXPECT_THROW(stratified_kfold(c, 1, 1), ValidationError);
}

// Randomised trials: disjoint, exhaustive, class-balanced within one.
TEST(Folds, PropertiesHoldOnRandomCorpora) {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    for (int k : {2, 5, 10}) {
      const std::size_t n = trial < 3 ? 10000 : 10 + rng.below(400);
      const std::size_t n_fake = std::max<std::size_t>(k, rng.below(n));
      const std::size_t n_true = std::max<std::size_t>(k, n - std::min(n, n_fake));
      const Corpus c = labeled(n_fake, n_true, rng.below(4));
      const auto folds = stratified_kfold(c, k, rng.next());
      EXPECT_EQ(oracle::check_folds(c, folds), "") << "n=" << n << " k=" << k;
    }
  }
}
