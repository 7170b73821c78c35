#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "newscheck/evaluation.hpp"
#include "newscheck/ingest.hpp"
#include "newscheck/pipeline.hpp"

namespace newscheck {

/// One model the service should serve, before it is trained.
struct EnsembleMember {
  std::string id;
  FeatureKind features = FeatureKind::Tfidf;
  ModelFamily family = ModelFamily::LogReg;
  ParamMap params;
};

/// Project-wide settings file:
///
///   {
///     "features": {"tfidf": FeatureConfig, "cbow": ..., "skipgram": ...},
///     "cv": {"k": 5, "seed": 1, "positive": "fake"},
///     "fetch": FetchPolicy,
///     "ensemble": [{"id", "features", "family", "params": {k: v}}]
///   }
///
/// Every key is optional; omitted ones keep their defaults.
struct ProjectConfig {
  std::map<FeatureKind, FeatureConfig> features;
  CvOptions cv;
  FetchPolicy fetch;
  std::vector<EnsembleMember> ensemble;

  /// Built-in feature defaults and the four TF-IDF models served by default.
  static ProjectConfig defaults();
  const FeatureConfig& feature(FeatureKind kind) const;
  PipelineSpec spec_for(const EnsembleMember& member) const;
};

void to_json(nlohmann::json& j, const CvOptions& o);
void from_json(const nlohmann::json& j, CvOptions& o);
void to_json(nlohmann::json& j, const EnsembleMember& m);
void from_json(const nlohmann::json& j, EnsembleMember& m);
void to_json(nlohmann::json& j, const ProjectConfig& c);
/// Throws ConfigError on bad values or duplicate ensemble ids.
ProjectConfig parse_project_config(const nlohmann::json& j);
ProjectConfig load_project_config(const std::filesystem::path& path);

/// "k=v" strings to a ParamMap. Throws ConfigError on a missing '=' or repeated key.
ParamMap parse_param_list(const std::vector<std::string>& items);

}  // namespace newscheck
