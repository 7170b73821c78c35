#include "newscheck/pipeline.hpp"

#include "newscheck/error.hpp"

namespace newscheck {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Tfidf: return "tfidf";
    case FeatureKind::Cbow: return "cbow";
    case FeatureKind::SkipGram: return "skipgram";
  }
  return "?";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "tfidf" || text == "tf-idf") return FeatureKind::Tfidf;
  if (text == "cbow") return FeatureKind::Cbow;
  if (text == "skipgram" || text == "skip-gram") return FeatureKind::SkipGram;
  throw ConfigError("unknown feature kind '" + std::string(text) + "'");
}

std::string_view display_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Tfidf: return "Tf-Idf";
    case FeatureKind::Cbow: return "Cbow";
    case FeatureKind::SkipGram: return "Skipgram";
  }
  return "?";
}

FeatureConfig FeatureConfig::defaults(FeatureKind kind) {
  FeatureConfig c;
  c.kind = kind;
  if (kind == FeatureKind::Tfidf) {
    c.prep = PrepConfig::for_tfidf();
  } else {
    c.prep = PrepConfig::for_word2vec();
    c.w2v.mode = kind == FeatureKind::Cbow ? W2vMode::CBOW : W2vMode::SkipGram;
  }
  return c;
}

void to_json(nlohmann::json& j, const FeatureConfig& c) {
  j = nlohmann::json{{"kind", std::string(to_string(c.kind))},
                     {"prep", c.prep},
                     {"tfidf", c.tfidf},
                     {"word2vec", c.w2v},
                     {"phrase_min_count", c.phrase_min_count},
                     {"phrase_threshold", c.phrase_threshold}};
}

void from_json(const nlohmann::json& j, FeatureConfig& c) {
  c = FeatureConfig::defaults(parse_feature_kind(j.at("kind").get<std::string>()));
  if (j.contains("prep")) j.at("prep").get_to(c.prep);
  if (j.contains("tfidf")) j.at("tfidf").get_to(c.tfidf);
  if (j.contains("word2vec")) j.at("word2vec").get_to(c.w2v);
  c.phrase_min_count = j.value("phrase_min_count", c.phrase_min_count);
  c.phrase_threshold = j.value("phrase_threshold", c.phrase_threshold);
  if (c.kind == FeatureKind::Cbow) c.w2v.mode = W2vMode::CBOW;
  if (c.kind == FeatureKind::SkipGram) c.w2v.mode = W2vMode::SkipGram;
}

bool is_feature_param(const std::string& key) { return key == "ngram_range" || key == "min_df"; }

std::string PipelineSpec::descriptor() const {
  return std::string(to_string(family)) + "+" + std::string(to_string(features.kind));
}

FeatureConfig PipelineSpec::effective_features() const {
  FeatureConfig c = features;
  for (const auto& [k, v] : params) {
    if (k == "ngram_range") {
      if (c.kind != FeatureKind::Tfidf) throw ConfigError("ngram_range applies to tfidf features only");
      c.tfidf.ngram_range = parse_ngram_range(v);
    } else if (k == "min_df") {
      try {
        c.tfidf.min_df = static_cast<std::size_t>(std::stoul(v));
      } catch (const std::exception&) {
        throw ConfigError("min_df expects an integer, got '" + v + "'");
      }
    }
  }
  return c;
}

ParamMap PipelineSpec::model_params() const {
  ParamMap out;
  for (const auto& [k, v] : params) {
    if (!is_feature_param(k)) out.emplace(k, v);
  }
  return out;
}

std::size_t Featurizer::dimension() const {
  if (tfidf) return tfidf->dimension();
  if (embeddings) return embeddings->dim();
  return 0;
}

TokenStream Featurizer::tokens(std::string_view text) const { return preprocess(text, prep); }

SparseVector Featurizer::features(const TokenStream& toks) const {
  if (kind == FeatureKind::Tfidf) {
    if (!tfidf) throw ValidationError("featurizer has no fitted tf-idf model");
    return transform(*tfidf, toks);
  }
  if (!embeddings) throw ValidationError("featurizer has no fitted embeddings");
  const TokenStream phrased = phraser ? apply_phraser(*phraser, toks) : toks;
  const DenseVector v = doc_vector(*embeddings, phrased);
  return SparseVector::from_dense(v);
}

Featurizer fit_featurizer(const FeatureConfig& config, std::span<const TokenStream> streams,
                          std::span<const TokenStream> unlabeled) {
  Featurizer f;
  f.kind = config.kind;
  f.prep = config.prep;
  if (config.kind == FeatureKind::Tfidf) {
    f.tfidf = fit_tfidf(streams, config.tfidf);
    return f;
  }
  std::vector<TokenStream> all(streams.begin(), streams.end());
  all.insert(all.end(), unlabeled.begin(), unlabeled.end());
  if (config.prep.terminal_stage == TerminalStage::Phrase) {
    f.phraser = fit_phraser(all, config.phrase_min_count, config.phrase_threshold);
    for (auto& s : all) s = apply_phraser(*f.phraser, s);
  }
  W2vConfig w2v = config.w2v;
  w2v.mode = config.kind == FeatureKind::Cbow ? W2vMode::CBOW : W2vMode::SkipGram;
  f.embeddings = train_word2vec(all, w2v);
  return f;
}

ProbPair FittedPipeline::predict_tokens(const TokenStream& tokens) const {
  const SparseVector v = featurizer.features(tokens);
  return predict_proba(model, SparseRow{v.indices, v.values});
}

ProbPair FittedPipeline::predict(std::string_view text) const { return predict_tokens(featurizer.tokens(text)); }

std::vector<TokenStream> preprocess_documents(const Corpus& corpus, std::span<const std::size_t> indices,
                                              const PrepConfig& config) {
  std::vector<TokenStream> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(preprocess(corpus[i].text, config));
  return out;
}

FittedPipeline fit_pipeline_streams(const PipelineSpec& spec, std::span<const TokenStream> streams,
                                    std::span<const Label> labels, std::span<const TokenStream> unlabeled) {
  if (streams.size() != labels.size()) throw ValidationError("streams and labels differ in length");
  FittedPipeline p;
  p.spec = spec;
  const FeatureConfig features = spec.effective_features();
  p.featurizer = fit_featurizer(features, streams, unlabeled);

  LabeledMatrix data;
  data.x = SparseMatrix({}, p.featurizer.dimension());
  data.y.reserve(streams.size());
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (labels[i] == Label::Unknown) throw ValidationError("training document without a label");
    data.x.append(p.featurizer.features(streams[i]));
    data.y.push_back(labels[i] == Label::Fake ? 1 : 0);
  }
  p.model = train_model(spec.family, data, spec.model_params(), spec.seed);
  return p;
}

FittedPipeline fit_pipeline(const PipelineSpec& spec, const Corpus& corpus, std::span<const std::size_t> train,
                            std::span<const TokenStream> unlabeled) {
  const auto streams = preprocess_documents(corpus, train, spec.effective_features().prep);
  std::vector<Label> labels;
  labels.reserve(train.size());
  for (auto i : train) labels.push_back(corpus[i].label);
  return fit_pipeline_streams(spec, streams, labels, unlabeled);
}

}  // namespace newscheck
