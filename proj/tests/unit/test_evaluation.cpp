#include <gtest/gtest.h>

#include "newscheck/artifact.hpp"
#include "newscheck/error.hpp"
#include "newscheck/evaluation.hpp"
#include "newscheck/random.hpp"
#include "newscheck/report.hpp"
#include "newscheck/synthetic.hpp"
#include "oracles.hpp"

using namespace newscheck;

namespace {

PipelineSpec tfidf_spec(ModelFamily family, ParamMap params = {}) {
  PipelineSpec s;
  s.family = family;
  s.features = FeatureConfig::defaults(FeatureKind::Tfidf);
  s.params = std::move(params);
  return s;
}

Corpus small_synthetic(std::size_t n = 120) {
  SyntheticOptions o;
  o.n_docs = n;
  o.seed = 5;
  return make_synthetic_corpus(o);
}

}  // namespace

TEST(Metrics, HandComputedCase) {
  using L = Label;
  const std::vector<L> truth{L::Fake, L::Fake, L::Fake, L::True, L::True, L::True};
  const std::vector<L> pred{L::Fake, L::Fake, L::True, L::Fake, L::True, L::True};
  const Metrics m = compute_metrics(truth, pred);
  EXPECT_DOUBLE_EQ(m.accuracy, 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(m.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
  const ConfusionMatrix cm = confusion(truth, pred);
  EXPECT_EQ(cm, (ConfusionMatrix{2, 1, 1, 2}));
}

TEST(Metrics, ZeroDenominatorsAndErrors) {
  using L = Label;
  const std::vector<L> truth{L::True, L::True};
  const Metrics m = compute_metrics(truth, truth);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_THROW(compute_metrics(std::vector<L>{}, std::vector<L>{}), ValidationError);
  EXPECT_THROW(compute_metrics(truth, std::vector<L>{L::True}), ValidationError);
  EXPECT_THROW(compute_metrics(std::vector<L>{L::Unknown}, std::vector<L>{L::True}), ValidationError);
}

// 1,000 random cases against the confusion-count oracle, exact equality.
TEST(Metrics, MatchesOracleExactly) {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<Label> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = rng.below(2) ? Label::Fake : Label::True;
      pred[i] = rng.below(2) ? Label::Fake : Label::True;
    }
    for (auto positive : {PositiveClass::Fake, PositiveClass::True}) {
      EXPECT_EQ(compute_metrics(truth, pred, positive), oracle::metrics(truth, pred, positive)) << "trial " << trial;
    }
  }
}

TEST(CrossValidate, FoldsFitOnTrainingSplitsOnly) {
  const Corpus c = small_synthetic();
  CvOptions o;
  o.k = 3;
  o.seed = 4;
  o.record_digests = true;
  const PipelineSpec spec = tfidf_spec(ModelFamily::LogReg);
  const CvReport r = cross_validate(spec, c, o);
  ASSERT_EQ(r.per_fold.size(), 3u);
  ASSERT_EQ(r.fold_digests.size(), 3u);
  const auto folds = stratified_kfold(c, 3, 4);
  for (int f = 0; f < 3; ++f) {
    const auto train = folds.train_indices(f);
    EXPECT_EQ(pipeline_digest(fit_pipeline(spec, c, train)), r.fold_digests[static_cast<std::size_t>(f)]);
  }
  double acc = 0;
  for (const auto& m : r.per_fold) acc += m.accuracy;
  EXPECT_NEAR(r.mean.accuracy, acc / 3, 1e-15);
  EXPECT_EQ(r.descriptor, "logreg+tfidf");
  // 80 training rows under L1 with C=1: the penalty dominates, so only above chance.
  EXPECT_GT(r.mean.accuracy, 0.6);
}

TEST(CrossValidate, FailuresNameTheFold) {
  const Corpus c = small_synthetic(40);
  try {
    cross_validate(tfidf_spec(ModelFamily::Gbdt, {{"max_depth", "-3"}}), c, {.k = 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("fold"), std::string::npos);
  }
}

TEST(GridSearch, SingletonGridEqualsDirectRun) {
  const Corpus c = small_synthetic(60);
  const PipelineSpec spec = tfidf_spec(ModelFamily::AdaBoost);
  CvOptions o;
  o.k = 3;
  const auto grid = grid_search({{"n_estimators", {"10"}}}, spec, c, o);
  PipelineSpec direct = spec;
  direct.params["n_estimators"] = "10";
  const CvReport r = cross_validate(direct, c, o);
  ASSERT_EQ(grid.size(), 1u);
  EXPECT_EQ(grid[0].per_fold, r.per_fold);
  EXPECT_EQ(grid[0].params, r.params);
}

TEST(GridSearch, ExpansionAndRanking) {
  const auto maps = expand_grid({{"b", {"1", "2"}}, {"a", {"x", "y", "z"}}}, {{"c", "k"}});
  ASSERT_EQ(maps.size(), 6u);
  EXPECT_EQ(maps[0], (ParamMap{{"a", "x"}, {"b", "1"}, {"c", "k"}}));
  EXPECT_EQ(render_params({{"ngram_range", "1"}, {"C", "1.0"}, {"penalty", "l1"}}), "C=1.0, penalty=l1, ngram_range=1");
  CvReport a, b;
  a.mean.f1 = 0.9;
  b.mean.f1 = 0.8;
  b.mean.accuracy = 1.0;
  EXPECT_TRUE(ranks_before(a, b));
  b.mean.f1 = 0.9;
  EXPECT_TRUE(ranks_before(b, a));
}

// Threshold rule: strictly above 0.5 counts as true.
TEST(SourceScores, ThresholdArithmetic) {
  const std::vector<std::string> sources{"s1", "s1", "s2", "s2"};
  const std::vector<double> p{0.6, 0.4, 0.7, 0.9};
  const auto scores = tally_sources(sources, p, "m");
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_DOUBLE_EQ(scores[0].pct_true, 0.5);
  EXPECT_DOUBLE_EQ(scores[1].pct_true, 1.0);
  const auto half = tally_sources(std::vector<std::string>{"s", ""}, std::vector<double>{0.5, 0.9}, "m");
  ASSERT_EQ(half.size(), 2u);
  EXPECT_EQ(half[0].source, "s");
  EXPECT_EQ(half[0].n_true, 0u);
  EXPECT_EQ(half[1].source, "unknown");
}

TEST(SourceScores, BankScoring) {
  const Corpus train = small_synthetic(80);
  const FittedPipeline p = fit_pipeline(tfidf_spec(ModelFamily::LogReg), train, train.labeled_indices());
  SyntheticOptions o;
  Rng rng(8);
  std::vector<Document> bank;
  for (int i = 0; i < 30; ++i) {
    const bool credible = i % 3 != 0;
    bank.push_back({"b" + std::to_string(i), synthetic_text(credible ? Label::True : Label::Fake, o, rng),
                    Label::Unknown, i % 3 == 0 ? std::optional<std::string>("boatos") : "jornal", {}, {}});
  }
  const Corpus bank_corpus(bank);
  const std::vector<NamedPipeline> bundle{{"lr", &p}};
  const auto scores = score_sources(bundle, bank_corpus);
  std::size_t total = 0;
  for (const auto& s : scores) {
    total += s.n;
    EXPECT_GE(s.pct_true, 0.0);
    EXPECT_LE(s.pct_true, 1.0);
  }
  EXPECT_EQ(total, bank_corpus.size());
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_EQ(scores[0].source, "boatos");
  EXPECT_LT(scores[0].pct_true, scores[1].pct_true);
}

TEST(Report, TableLayout) {
  CvReport r;
  r.family = ModelFamily::Gbdt;
  r.feature_kind = FeatureKind::Tfidf;
  r.params = {{"learning_rate", "0.3"}, {"ngram_range", "1"}};
  r.mean = {.accuracy = 0.9617, .precision = 0.95, .recall = 0.97, .f1 = 0.9616};
  const std::vector<CvReport> rows{r};
  const std::string table = format_table(rows);
  EXPECT_EQ(table.substr(0, table.find('\n')),
            "Models    Best parameters                   Accuracy (%)  F1 (%)  Precision (%)  Recall (%)  Features");
  EXPECT_NE(table.find("LightGBM  learning_rate=0.3, ngram_range=1         96.17   96.16          95.00       97.00  Tf-Idf"),
            std::string::npos)
      << table;
  const auto preset = comparison_preset();
  ASSERT_EQ(preset.size(), 15u);
  EXPECT_EQ(preset[6].params.at("ngram_range"), "22");
}

TEST(Synthetic, GeneratorIsDeterministicAndBalanced) {
  const Corpus a = make_synthetic_corpus();
  EXPECT_EQ(a, make_synthetic_corpus());
  EXPECT_EQ(a.size(), 400u);
  EXPECT_EQ(a.count(Label::Fake), 200u);
  EXPECT_EQ(synthetic_word(SyntheticPool::Fake, 0), "fxbak");
  EXPECT_EQ(synthetic_word(SyntheticPool::True, 12), "tvdefik");
  // Words pass through preprocessing untouched.
  const auto tokens = preprocess(a[0].text, PrepConfig::for_tfidf());
  EXPECT_EQ(tokens, tokenize(a[0].text));
}
