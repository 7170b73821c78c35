#include "newscheck/report.hpp"

#include <algorithm>
#include <cstdio>

namespace newscheck {

using nlohmann::json;

json to_json(const Metrics& m) {
  return json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"positive_class", std::string(to_string(m.positive))}};
}

json to_json(const CvReport& r) {
  json folds = json::array();
  for (const auto& m : r.per_fold) folds.push_back(to_json(m));
  json j{{"pipeline", r.descriptor},
         {"model", std::string(to_string(r.family))},
         {"features", std::string(to_string(r.feature_kind))},
         {"params", r.params},
         {"k", r.k},
         {"seed", r.seed},
         {"per_fold", folds},
         {"mean", to_json(r.mean)},
         {"std", {{"accuracy", r.std.accuracy}, {"precision", r.std.precision}, {"recall", r.std.recall}, {"f1", r.std.f1}}},
         {"seconds", r.seconds}};
  if (!r.fold_digests.empty()) j["fold_digests"] = r.fold_digests;
  return j;
}

json to_json(std::span<const CvReport> reports) {
  json out = json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  return out;
}

json to_json(std::span<const SourceScore> scores) {
  json out = json::array();
  for (const auto& s : scores) {
    out.push_back(json{{"pipeline", s.pipeline}, {"source", s.source}, {"n", s.n}, {"n_true", s.n_true}, {"pct_true", s.pct_true}});
  }
  return out;
}

namespace {

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

// Left-aligned text columns, right-aligned numeric ones.
std::string render(const std::vector<std::vector<std::string>>& rows, const std::vector<bool>& numeric) {
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string line;
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      const auto& cell = rows[i][c];
      const std::string pad(width[c] - cell.size(), ' ');
      if (c > 0) line += "  ";
      line += numeric[c] ? pad + cell : cell + pad;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    }
  }
  return out;
}

}  // namespace

std::string format_table(std::span<const CvReport> reports) {
  std::vector<std::vector<std::string>> rows{
      {"Models", "Best parameters", "Accuracy (%)", "F1 (%)", "Precision (%)", "Recall (%)", "Features"}};
  for (const auto& r : reports) {
    rows.push_back({std::string(display_name(r.family)), render_params(r.params), percent(r.mean.accuracy),
                    percent(r.mean.f1), percent(r.mean.precision), percent(r.mean.recall),
                    std::string(display_name(r.feature_kind))});
  }
  return render(rows, {false, false, true, true, true, true, false});
}

std::string format_source_table(std::span<const SourceScore> scores) {
  std::vector<std::vector<std::string>> rows{{"Pipeline", "Source", "News", "True (%)"}};
  for (const auto& s : scores) rows.push_back({s.pipeline, s.source, std::to_string(s.n), percent(s.pct_true)});
  return render(rows, {false, false, true, true});
}

std::vector<PipelineSpec> comparison_preset() {
  struct Row {
    ModelFamily family;
    FeatureKind kind;
    ParamMap params;
  };
  using F = ModelFamily;
  using K = FeatureKind;
  const std::vector<Row> rows{
      {F::LogReg, K::Tfidf, {{"C", "1.0"}, {"penalty", "l1"}, {"ngram_range", "1"}}},
      {F::LogReg, K::Cbow, {{"C", "0.01"}, {"penalty", "l1"}}},
      {F::LogReg, K::SkipGram, {{"C", "0.01"}, {"penalty", "l1"}}},
      {F::Svm, K::Tfidf, {{"C", "1"}, {"gamma", "0.001"}, {"ngram_range", "1"}}},
      {F::Svm, K::Cbow, {{"C", "100"}, {"gamma", "0.001"}}},
      {F::Svm, K::SkipGram, {{"C", "100"}, {"gamma", "0.001"}}},
      {F::RandomForest, K::Tfidf, {{"n_estimators", "20"}, {"ngram_range", "22"}}},
      {F::RandomForest, K::Cbow, {{"n_estimators", "100"}}},
      {F::RandomForest, K::SkipGram, {{"n_estimators", "100"}}},
      {F::AdaBoost, K::Tfidf, {{"learning_rate", "1"}, {"n_estimators", "50"}, {"ngram_range", "1"}}},
      {F::AdaBoost, K::Cbow, {{"learning_rate", "1"}, {"n_estimators", "50"}}},
      {F::AdaBoost, K::SkipGram, {{"learning_rate", "1.0"}, {"n_estimators", "50"}}},
      {F::Gbdt, K::Tfidf, {{"learning_rate", "0.3"}, {"max_depth", "8"}, {"n_estimators", "100"}, {"ngram_range", "1"}}},
      {F::Gbdt, K::Cbow, {{"learning_rate", "0.3"}, {"max_depth", "8"}, {"n_estimators", "100"}}},
      {F::Gbdt, K::SkipGram, {{"learning_rate", "0.1"}, {"max_depth", "8"}, {"n_estimators", "100"}}},
  };
  std::vector<PipelineSpec> out;
  for (const auto& r : rows) {
    PipelineSpec s;
    s.family = r.family;
    s.features = FeatureConfig::defaults(r.kind);
    s.params = r.params;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace newscheck
