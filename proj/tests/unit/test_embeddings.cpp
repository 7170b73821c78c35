#include <cmath>

#include <gtest/gtest.h>

#include "newscheck/embeddings.hpp"
#include "newscheck/error.hpp"
#include "newscheck/random.hpp"
#include "oracles.hpp"

using namespace newscheck;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale) {
  Matrix m(rows, cols);
  for (double& v : m.data) v = (rng.uniform() - 0.5) * scale;
  return m;
}

// Two disjoint vocabularies that never share a sentence.
std::vector<TokenStream> two_cluster_corpus(std::uint64_t seed) {
  const std::vector<std::string> a{"sol", "praia", "mar", "areia", "onda"};
  const std::vector<std::string> b{"neve", "frio", "gelo", "inverno", "casaco"};
  Rng rng(seed);
  std::vector<TokenStream> out;
  for (int s = 0; s < 200; ++s) {
    const auto& pool = s % 2 ? a : b;
    TokenStream t;
    for (int i = 0; i < 10; ++i) t.push_back(pool[rng.below(pool.size())]);
    out.push_back(t);
  }
  return out;
}

double mean_cosine(const EmbeddingModel& m, const std::vector<std::string>& x, const std::vector<std::string>& y,
                   bool same) {
  double s = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (same && j <= i) continue;
      s += m.similarity(x[i], y[j]);
      ++n;
    }
  }
  return s / n;
}

}  // namespace

TEST(Phraser, MergesFrequentPairs) {
  std::vector<TokenStream> streams;
  for (int i = 0; i < 30; ++i) streams.push_back({"sao", "paulo", "fica", "longe", "de" + std::to_string(i)});
  const Phraser p = fit_phraser(streams, 5, 1.0);
  EXPECT_TRUE(p.mergeable("sao", "paulo"));
  EXPECT_EQ(apply_phraser(p, {"sao", "paulo", "sao"}), (TokenStream{"sao_paulo", "sao"}));
  EXPECT_EQ(apply_phraser(p, {"paulo", "sao"}), (TokenStream{"paulo", "sao"}));
}

// Phrase score by hand: (count(ab) - min_count) * N / (count(a) * count(b)).
TEST(Phraser, ScoreFormula) {
  std::vector<TokenStream> streams;
  for (int i = 0; i < 6; ++i) streams.push_back({"a", "b"});
  streams.push_back({"a", "c"});
  const Phraser p = fit_phraser(streams, 5, 0.0);
  const double expected = (6.0 - 5.0) * 14.0 / (7.0 * 6.0);
  EXPECT_NEAR(p.pair_score.at({"a", "b"}), expected, 1e-12);
  EXPECT_EQ(p.pair_score.count({"a", "c"}), 0u);
}

// Analytic gradients against central differences, dim 5 and |V| 8.
TEST(Word2Vec, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix in = random_matrix(8, 5, rng, 1.0);
    const Matrix out = random_matrix(8, 5, rng, 1.0);
    NsExample skip{{static_cast<std::uint32_t>(rng.below(8))}, static_cast<std::uint32_t>(rng.below(8)), {}};
    NsExample cbow{{1, 2, 3, 5}, static_cast<std::uint32_t>(rng.below(8)), {}};
    for (int k = 0; k < 4; ++k) {
      skip.negatives.push_back(static_cast<std::uint32_t>(rng.below(8)));
      cbow.negatives.push_back(static_cast<std::uint32_t>(rng.below(8)));
    }
    EXPECT_LT(oracle::ns_gradient_check(in, out, skip), 1e-4) << "skip-gram trial " << trial;
    EXPECT_LT(oracle::ns_gradient_check(in, out, cbow), 1e-4) << "cbow trial " << trial;
  }
}

TEST(Word2Vec, TwoClustersSeparate) {
  const auto corpus = two_cluster_corpus(3);
  const std::vector<std::string> a{"sol", "praia", "mar", "areia", "onda"};
  const std::vector<std::string> b{"neve", "frio", "gelo", "inverno", "casaco"};
  for (auto mode : {W2vMode::SkipGram, W2vMode::CBOW}) {
    W2vConfig c;
    c.mode = mode;
    c.dim = 20;
    c.min_count = 1;
    c.epochs = 50;
    c.window = 2;
    const EmbeddingModel m = train_word2vec(corpus, c);
    const double within = (mean_cosine(m, a, a, true) + mean_cosine(m, b, b, true)) / 2;
    const double across = mean_cosine(m, a, b, false);
    EXPECT_GE(within - across, 0.2) << to_string(mode) << " within " << within << " across " << across;
    for (double v : m.input_vectors.data) ASSERT_TRUE(std::isfinite(v));
    EXPECT_LT(m.epoch_loss.back(), m.epoch_loss.front());
  }
}

TEST(Word2Vec, DeterministicSingleThreaded) {
  const auto corpus = two_cluster_corpus(4);
  W2vConfig c;
  c.dim = 8;
  c.min_count = 1;
  c.epochs = 3;
  const EmbeddingModel x = train_word2vec(corpus, c);
  const EmbeddingModel y = train_word2vec(corpus, c);
  EXPECT_EQ(x.input_vectors, y.input_vectors);
  EXPECT_EQ(x.output_vectors, y.output_vectors);
  c.seed = 2;
  EXPECT_NE(train_word2vec(corpus, c).input_vectors, x.input_vectors);
}

TEST(Word2Vec, VocabularyOrderAndDocVector) {
  const std::vector<TokenStream> corpus{{"b", "a", "a", "c", "c"}, {"a", "c", "d"}};
  W2vConfig c;
  c.dim = 4;
  c.min_count = 2;
  c.epochs = 1;
  const EmbeddingModel m = train_word2vec(corpus, c);
  EXPECT_EQ(m.terms, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(m.frequency, (std::vector<std::uint64_t>{3, 3}));
  const DenseVector v = doc_vector(m, {"a", "zzz", "c"});
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(v[k], (m.vector(0)[k] + m.vector(1)[k]) / 2, 1e-15);
  const DenseVector z = doc_vector(m, {"zzz"});
  for (double x : z) EXPECT_EQ(x, 0.0);
  EXPECT_DOUBLE_EQ(m.similarity("a", "a"), 1.0);
  c.min_count = 10;
  EXPECT_THROW(train_word2vec(corpus, c), ValidationError);
}

TEST(Word2Vec, ConfigValidationAndJson) {
  W2vConfig c;
  c.dim = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = W2vConfig{};
  c.alpha_min = 1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  W2vConfig d;
  d.mode = W2vMode::CBOW;
  d.epochs = 7;
  nlohmann::json j = d;
  EXPECT_EQ(j.get<W2vConfig>(), d);
}

TEST(Word2Vec, ParallelModeRuns) {
  const auto corpus = two_cluster_corpus(5);
  W2vConfig c;
  c.dim = 8;
  c.min_count = 1;
  c.epochs = 2;
  c.threads = 2;
  const EmbeddingModel m = train_word2vec(corpus, c);
  for (double v : m.input_vectors.data) ASSERT_TRUE(std::isfinite(v));
}
