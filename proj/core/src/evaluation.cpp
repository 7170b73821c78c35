#include "newscheck/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "newscheck/artifact.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

void aggregate(CvReport& r) {
  r.mean = Metrics{};
  r.std = MetricSpread{};
  if (r.per_fold.empty()) return;
  const double n = static_cast<double>(r.per_fold.size());
  r.mean.positive = r.per_fold.front().positive;
  for (const auto& m : r.per_fold) {
    r.mean.accuracy += m.accuracy / n;
    r.mean.precision += m.precision / n;
    r.mean.recall += m.recall / n;
    r.mean.f1 += m.f1 / n;
  }
  for (const auto& m : r.per_fold) {
    r.std.accuracy += (m.accuracy - r.mean.accuracy) * (m.accuracy - r.mean.accuracy) / n;
    r.std.precision += (m.precision - r.mean.precision) * (m.precision - r.mean.precision) / n;
    r.std.recall += (m.recall - r.mean.recall) * (m.recall - r.mean.recall) / n;
    r.std.f1 += (m.f1 - r.mean.f1) * (m.f1 - r.mean.f1) / n;
  }
  r.std.accuracy = std::sqrt(r.std.accuracy);
  r.std.precision = std::sqrt(r.std.precision);
  r.std.recall = std::sqrt(r.std.recall);
  r.std.f1 = std::sqrt(r.std.f1);
}

CvReport cross_validate(const PipelineSpec& spec, const Corpus& corpus, const CvOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const FoldAssignment folds = stratified_kfold(corpus, options.k, options.seed);
  const FeatureConfig features = spec.effective_features();

  // Preprocessing is stateless, so it is shared across folds.
  std::vector<TokenStream> streams(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].label != Label::Unknown) streams[i] = preprocess(corpus[i].text, features.prep);
  }

  CvReport report;
  report.descriptor = spec.descriptor();
  report.feature_kind = spec.features.kind;
  report.family = spec.family;
  report.params = spec.params;
  report.k = options.k;
  report.seed = options.seed;
  for (int fold = 0; fold < options.k; ++fold) {
    const auto train = folds.train_indices(fold);
    const auto test = folds.test_indices(fold);
    std::vector<TokenStream> train_streams;
    std::vector<Label> train_labels;
    for (auto i : train) {
      train_streams.push_back(streams[i]);
      train_labels.push_back(corpus[i].label);
    }
    try {
      const FittedPipeline fitted = fit_pipeline_streams(spec, train_streams, train_labels);
      std::vector<Label> truth, predicted;
      for (auto i : test) {
        truth.push_back(corpus[i].label);
        predicted.push_back(fitted.predict_tokens(streams[i]).p_true > 0.5 ? Label::True : Label::Fake);
      }
      report.per_fold.push_back(compute_metrics(truth, predicted, options.positive));
      if (options.record_digests) report.fold_digests.push_back(pipeline_digest(fitted));
    } catch (const Error& e) {
      throw Error("fold " + std::to_string(fold) + " of " + report.descriptor + ": " + e.what());
    }
  }
  aggregate(report);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<ParamMap> expand_grid(const ParamGrid& grid, const ParamMap& base) {
  std::vector<ParamMap> points{base};
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw ConfigError("grid parameter '" + key + "' has no values");
    std::vector<ParamMap> next;
    for (const auto& p : points) {
      for (const auto& v : values) {
        ParamMap q = p;
        q[key] = v;
        next.push_back(std::move(q));
      }
    }
    points.swap(next);
  }
  return points;
}

std::string render_params(const ParamMap& params) {
  std::string out;
  auto add = [&](const std::string& k, const std::string& v) {
    if (!out.empty()) out += ", ";
    out += k + "=" + v;
  };
  for (const auto& [k, v] : params) {
    if (k != "ngram_range") add(k, v);
  }
  if (auto it = params.find("ngram_range"); it != params.end()) add(it->first, it->second);
  return out;
}

bool ranks_before(const CvReport& a, const CvReport& b) {
  if (a.mean.f1 != b.mean.f1) return a.mean.f1 > b.mean.f1;
  if (a.mean.accuracy != b.mean.accuracy) return a.mean.accuracy > b.mean.accuracy;
  return render_params(a.params) < render_params(b.params);
}

std::vector<CvReport> grid_search(const ParamGrid& grid, const PipelineSpec& spec, const Corpus& corpus,
                                  const CvOptions& options) {
  if (grid.empty()) throw ConfigError("parameter grid is empty");
  std::vector<CvReport> reports;
  for (const auto& params : expand_grid(grid, spec.params)) {
    PipelineSpec point = spec;
    point.params = params;
    reports.push_back(cross_validate(point, corpus, options));
  }
  std::stable_sort(reports.begin(), reports.end(), ranks_before);
  return reports;
}

std::vector<SourceScore> tally_sources(std::span<const std::string> sources, std::span<const double> p_true,
                                       const std::string& pipeline, double threshold) {
  if (sources.size() != p_true.size()) throw ValidationError("sources and probabilities differ in length");
  std::map<std::string, SourceScore> by_source;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const std::string& name = sources[i].empty() ? std::string("unknown") : sources[i];
    auto& s = by_source[name];
    s.pipeline = pipeline;
    s.source = name;
    ++s.n;
    if (p_true[i] > threshold) ++s.n_true;
  }
  std::vector<SourceScore> out;
  for (auto& [name, s] : by_source) {
    s.pct_true = static_cast<double>(s.n_true) / static_cast<double>(s.n);
    out.push_back(s);
  }
  return out;
}

std::vector<SourceScore> score_sources(std::span<const NamedPipeline> bundle, const Corpus& bank, double threshold) {
  std::vector<std::string> sources;
  sources.reserve(bank.size());
  for (const auto& d : bank.documents()) sources.push_back(d.source.value_or(""));
  std::vector<SourceScore> out;
  for (const auto& entry : bundle) {
    if (entry.pipeline == nullptr) throw ValidationError("score_sources: null pipeline '" + entry.name + "'");
    std::vector<double> p;
    p.reserve(bank.size());
    for (const auto& d : bank.documents()) p.push_back(entry.pipeline->predict(d.text).p_true);
    auto part = tally_sources(sources, p, entry.name, threshold);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace newscheck
