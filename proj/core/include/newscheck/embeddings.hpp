#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "newscheck/sparse.hpp"
#include "newscheck/textprep.hpp"

namespace newscheck {

// ------------------------------------------------------------------ phrases

/// Adjacent-pair merger. A pair is mergeable when its score exceeds the threshold:
///   score(a, b) = (count(ab) - min_count) * N_tokens / (count(a) * count(b))
/// Only pairs seen at least min_count times are scored.
struct Phraser {
  std::map<std::pair<std::string, std::string>, double> pair_score;
  double threshold = 10.0;
  std::size_t min_count = 5;
  std::string delimiter = "_";

  bool mergeable(const std::string& a, const std::string& b) const;
};

Phraser fit_phraser(std::span<const TokenStream> streams, std::size_t min_count, double threshold);

/// Single greedy left-to-right pass; a merge consumes both tokens.
TokenStream apply_phraser(const Phraser& phraser, const TokenStream& tokens);

// ----------------------------------------------------------------- word2vec

enum class W2vMode { CBOW, SkipGram };

std::string_view to_string(W2vMode mode);
W2vMode parse_w2v_mode(std::string_view text);

struct W2vConfig {
  W2vMode mode = W2vMode::SkipGram;
  int dim = 100;
  int window = 2;
  int min_count = 20;
  double alpha0 = 0.03;
  double alpha_min = 0.0007;
  int negatives = 5;
  int epochs = 30;
  std::uint64_t seed = 1;
  /// 1 = deterministic. More threads train lock-free and are not reproducible.
  int threads = 1;

  /// Throws ValidationError when an invariant fails.
  void validate() const;
  bool operator==(const W2vConfig&) const = default;
};

void to_json(nlohmann::json& j, const W2vConfig& c);
void from_json(const nlohmann::json& j, W2vConfig& c);

/// Row-major |V| x dim matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  std::span<double> row(std::size_t i) { return std::span(data).subspan(i * cols, cols); }
  std::span<const double> row(std::size_t i) const { return std::span(data).subspan(i * cols, cols); }

  bool operator==(const Matrix&) const = default;
};

struct EmbeddingModel {
  std::vector<std::string> terms;  // by descending frequency, ties lexicographic
  std::vector<std::uint64_t> frequency;
  std::unordered_map<std::string, std::uint32_t> index;
  Matrix input_vectors;
  Matrix output_vectors;
  W2vConfig config;
  /// Mean negative-sampling loss per training example, one entry per epoch.
  std::vector<double> epoch_loss;

  std::size_t size() const { return terms.size(); }
  std::size_t dim() const { return input_vectors.cols; }
  long find(const std::string& term) const;
  std::span<const double> vector(std::size_t i) const { return input_vectors.row(i); }
  double similarity(const std::string& a, const std::string& b) const;
  void rebuild_index();
};

/// One negative-sampling training example.
///   SkipGram: inputs = {center}, target = one context word.
///   CBOW:     inputs = context words (averaged), target = center word.
struct NsExample {
  std::vector<std::uint32_t> inputs;
  std::uint32_t target = 0;
  std::vector<std::uint32_t> negatives;
};

/// L = -log s(v_target . h) - sum_n log s(-v_n . h), h = mean of input rows.
double negative_sampling_loss(const Matrix& input, const Matrix& output, const NsExample& ex);

struct NsGradient {
  double loss = 0.0;
  std::map<std::uint32_t, DenseVector> d_input;
  std::map<std::uint32_t, DenseVector> d_output;
};

/// Analytic gradient of negative_sampling_loss; the same kernel drives training.
NsGradient negative_sampling_gradient(const Matrix& input, const Matrix& output, const NsExample& ex);

/// SGD with negative sampling. Learning rate decays linearly from alpha0 to
/// alpha_min over all scheduled updates. Throws ValidationError if no term
/// reaches min_count.
EmbeddingModel train_word2vec(std::span<const TokenStream> streams, const W2vConfig& config);

/// Mean of the input vectors of in-vocabulary tokens; zero vector when none are.
DenseVector doc_vector(const EmbeddingModel& model, const TokenStream& tokens);

}  // namespace newscheck
