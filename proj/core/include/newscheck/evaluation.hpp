#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "newscheck/corpus.hpp"
#include "newscheck/metrics.hpp"
#include "newscheck/pipeline.hpp"

namespace newscheck {

struct MetricSpread {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const MetricSpread&) const = default;
};

struct CvReport {
  std::string descriptor;
  FeatureKind feature_kind = FeatureKind::Tfidf;
  ModelFamily family = ModelFamily::LogReg;
  ParamMap params;
  int k = 5;
  std::uint64_t seed = 1;
  std::vector<Metrics> per_fold;
  Metrics mean;
  /// Population standard deviation across folds.
  MetricSpread std;
  /// Digest of each fold's fitted pipeline, when requested.
  std::vector<std::string> fold_digests;
  double seconds = 0.0;
};

/// Unweighted fold averages and spreads.
void aggregate(CvReport& report);

struct CvOptions {
  int k = 5;
  std::uint64_t seed = 1;
  PositiveClass positive = PositiveClass::Fake;
  bool record_digests = false;
};

/// Every fitted stage (vocabulary, idf, phraser, embeddings, model) sees only
/// the training split of its fold. Fit errors are rethrown with the fold index.
CvReport cross_validate(const PipelineSpec& spec, const Corpus& corpus, const CvOptions& options = {});

/// Parameter name -> candidate values (as text).
using ParamGrid = std::map<std::string, std::vector<std::string>>;

/// Cartesian product of the grid over spec.params, in lexicographic key order.
std::vector<ParamMap> expand_grid(const ParamGrid& grid, const ParamMap& base = {});

/// Best first: mean F1, then mean accuracy (both descending), then params.
std::vector<CvReport> grid_search(const ParamGrid& grid, const PipelineSpec& spec, const Corpus& corpus,
                                  const CvOptions& options = {});
bool ranks_before(const CvReport& a, const CvReport& b);

/// "k=v, k=v" in key order with ngram_range last.
std::string render_params(const ParamMap& params);

struct SourceScore {
  std::string pipeline;
  std::string source;
  std::size_t n = 0;
  std::size_t n_true = 0;
  double pct_true = 0.0;
};

/// Counts a document as true only when p_true > threshold. Documents without a
/// source fall under "unknown". Output is grouped by source name.
std::vector<SourceScore> tally_sources(std::span<const std::string> sources, std::span<const double> p_true,
                                       const std::string& pipeline, double threshold = 0.5);

struct NamedPipeline {
  std::string name;
  const FittedPipeline* pipeline = nullptr;
};

std::vector<SourceScore> score_sources(std::span<const NamedPipeline> bundle, const Corpus& bank,
                                       double threshold = 0.5);

}  // namespace newscheck
