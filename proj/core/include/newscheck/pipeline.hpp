#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "newscheck/classifiers.hpp"
#include "newscheck/corpus.hpp"
#include "newscheck/embeddings.hpp"
#include "newscheck/textprep.hpp"
#include "newscheck/vectorizer.hpp"

namespace newscheck {

enum class FeatureKind { Tfidf, Cbow, SkipGram };

/// "tfidf", "cbow", "skipgram".
std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);
/// "Tf-Idf", "Cbow", "Skipgram" as printed in reports.
std::string_view display_name(FeatureKind kind);

struct FeatureConfig {
  FeatureKind kind = FeatureKind::Tfidf;
  PrepConfig prep = PrepConfig::for_tfidf();
  TfidfOptions tfidf;
  W2vConfig w2v;
  std::size_t phrase_min_count = 5;
  double phrase_threshold = 10.0;

  /// Stemming + TF-IDF, or phrasing + Word2Vec in the matching mode.
  static FeatureConfig defaults(FeatureKind kind);
};

void to_json(nlohmann::json& j, const FeatureConfig& c);
void from_json(const nlohmann::json& j, FeatureConfig& c);

/// Keys routed to the feature stage rather than the model ("ngram_range", "min_df").
bool is_feature_param(const std::string& key);

struct PipelineSpec {
  FeatureConfig features;
  ModelFamily family = ModelFamily::LogReg;
  /// Model hyperparameters plus feature keys such as ngram_range.
  ParamMap params;
  std::uint64_t seed = 1;

  /// "<family>+<feature kind>", e.g. "gbdt+tfidf".
  std::string descriptor() const;
  /// Feature config with feature keys from params applied.
  FeatureConfig effective_features() const;
  ParamMap model_params() const;
};

/// Text -> feature row, with every fitted stage frozen.
struct Featurizer {
  FeatureKind kind = FeatureKind::Tfidf;
  PrepConfig prep;
  std::optional<TfidfModel> tfidf;
  std::optional<Phraser> phraser;
  std::optional<EmbeddingModel> embeddings;

  std::size_t dimension() const;
  /// Stateless preprocessing (no fitted stage involved).
  TokenStream tokens(std::string_view text) const;
  /// Fitted stages on already preprocessed tokens.
  SparseVector features(const TokenStream& tokens) const;
  SparseVector features(std::string_view text) const { return features(tokens(text)); }
};

/// Fits the fitted stages on `streams` (preprocessed training text). Word2Vec and the
/// phraser also see `unlabeled`, which must not contain evaluation documents.
Featurizer fit_featurizer(const FeatureConfig& config, std::span<const TokenStream> streams,
                          std::span<const TokenStream> unlabeled = {});

struct FittedPipeline {
  PipelineSpec spec;
  Featurizer featurizer;
  ClassifierModel model;

  ProbPair predict(std::string_view text) const;
  ProbPair predict_tokens(const TokenStream& tokens) const;
};

/// Preprocessed streams of the given documents, in order.
std::vector<TokenStream> preprocess_documents(const Corpus& corpus, std::span<const std::size_t> indices,
                                              const PrepConfig& config);

/// Fits features and model on the listed labeled documents only.
FittedPipeline fit_pipeline(const PipelineSpec& spec, const Corpus& corpus, std::span<const std::size_t> train,
                            std::span<const TokenStream> unlabeled = {});

/// Same as fit_pipeline with preprocessing already done; `streams[i]` belongs to `labels[i]`.
FittedPipeline fit_pipeline_streams(const PipelineSpec& spec, std::span<const TokenStream> streams,
                                    std::span<const Label> labels, std::span<const TokenStream> unlabeled = {});

}  // namespace newscheck
