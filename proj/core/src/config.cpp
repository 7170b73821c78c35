#include "newscheck/config.hpp"

#include <fstream>
#include <set>

namespace newscheck {

ProjectConfig ProjectConfig::defaults() {
  ProjectConfig c;
  for (auto kind : {FeatureKind::Tfidf, FeatureKind::Cbow, FeatureKind::SkipGram}) {
    c.features[kind] = FeatureConfig::defaults(kind);
  }
  c.ensemble = {
      {"logreg-tfidf", FeatureKind::Tfidf, ModelFamily::LogReg, {{"C", "1.0"}, {"penalty", "l1"}}},
      {"rf-tfidf", FeatureKind::Tfidf, ModelFamily::RandomForest, {{"n_estimators", "100"}}},
      {"adaboost-tfidf", FeatureKind::Tfidf, ModelFamily::AdaBoost, {{"n_estimators", "50"}}},
      {"gbdt-tfidf",
       FeatureKind::Tfidf,
       ModelFamily::Gbdt,
       {{"learning_rate", "0.3"}, {"max_depth", "8"}, {"n_estimators", "100"}}},
  };
  return c;
}

const FeatureConfig& ProjectConfig::feature(FeatureKind kind) const {
  auto it = features.find(kind);
  if (it == features.end()) throw ConfigError("no feature config for '" + std::string(to_string(kind)) + "'");
  return it->second;
}

PipelineSpec ProjectConfig::spec_for(const EnsembleMember& member) const {
  PipelineSpec spec;
  spec.features = feature(member.features);
  spec.family = member.family;
  spec.params = member.params;
  spec.seed = cv.seed;
  return spec;
}

void to_json(nlohmann::json& j, const CvOptions& o) {
  j = nlohmann::json{{"k", o.k}, {"seed", o.seed}, {"positive", std::string(to_string(o.positive))}};
}

void from_json(const nlohmann::json& j, CvOptions& o) {
  o.k = j.value("k", o.k);
  o.seed = j.value("seed", o.seed);
  if (j.contains("positive")) o.positive = parse_positive_class(j.at("positive").get<std::string>());
  if (o.k < 2) throw ConfigError("cv.k must be at least 2");
}

void to_json(nlohmann::json& j, const EnsembleMember& m) {
  j = nlohmann::json{{"id", m.id},
                     {"features", std::string(to_string(m.features))},
                     {"family", std::string(to_string(m.family))},
                     {"params", m.params}};
}

void from_json(const nlohmann::json& j, EnsembleMember& m) {
  m.id = j.at("id").get<std::string>();
  m.features = parse_feature_kind(j.at("features").get<std::string>());
  m.family = parse_model_family(j.at("family").get<std::string>());
  m.params.clear();
  if (j.contains("params")) {
    for (const auto& [k, v] : j.at("params").items()) {
      // Numbers are accepted as a convenience and kept in their JSON spelling.
      m.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
}

void to_json(nlohmann::json& j, const ProjectConfig& c) {
  nlohmann::json features = nlohmann::json::object();
  for (const auto& [kind, fc] : c.features) features[std::string(to_string(kind))] = fc;
  j = nlohmann::json{{"features", features}, {"cv", c.cv}, {"fetch", c.fetch}, {"ensemble", c.ensemble}};
}

ProjectConfig parse_project_config(const nlohmann::json& j) {
  ProjectConfig c = ProjectConfig::defaults();
  try {
    if (j.contains("features")) {
      for (const auto& [name, value] : j.at("features").items()) {
        const FeatureKind kind = parse_feature_kind(name);
        nlohmann::json v = value;
        v["kind"] = name;
        FeatureConfig fc = v.get<FeatureConfig>();
        fc.kind = kind;
        c.features[kind] = fc;
      }
    }
    if (j.contains("cv")) j.at("cv").get_to(c.cv);
    if (j.contains("fetch")) j.at("fetch").get_to(c.fetch);
    if (j.contains("ensemble")) c.ensemble = j.at("ensemble").get<std::vector<EnsembleMember>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed project config: ") + e.what());
  }
  std::set<std::string> ids;
  for (const auto& m : c.ensemble) {
    if (m.id.empty() || !ids.insert(m.id).second) throw ConfigError("ensemble ids must be unique and nonempty");
  }
  return c;
}

ProjectConfig load_project_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  try {
    return parse_project_config(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

ParamMap parse_param_list(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + item + "'");
    if (!out.emplace(item.substr(0, eq), item.substr(eq + 1)).second) {
      throw ConfigError("parameter '" + item.substr(0, eq) + "' given twice");
    }
  }
  return out;
}

}  // namespace newscheck
