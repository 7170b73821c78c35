#include <cmath>
#include <fstream>
#include <set>

#include "newscheck/service.hpp"

namespace newscheck {

namespace fs = std::filesystem;
using nlohmann::json;

void ModelRegistry::validate() const {
  if (entries.empty()) throw ConfigError("model registry is empty");
  std::set<std::string> ids;
  double total = 0.0;
  for (const auto& e : entries) {
    if (e.id.empty()) throw ConfigError("registry entry with empty id");
    if (!ids.insert(e.id).second) throw ConfigError("duplicate registry id '" + e.id + "'");
    if (!std::isfinite(e.weight) || e.weight < 0) {
      throw ConfigError("registry entry '" + e.id + "' has an invalid weight");
    }
    if (!e.pipeline) throw ConfigError("registry entry '" + e.id + "' has no pipeline");
    total += e.weight;
  }
  if (!(total > 0)) throw ConfigError("registry weights are all zero");
}

namespace {

json read_manifest(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read manifest '" + file.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("manifest '" + file.string() + "' is not valid JSON: " + e.what());
  }
}

std::optional<double> number_at(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw ConfigError(std::string("manifest field '") + key + "' must be a number");
  return it->get<double>();
}

}  // namespace

ModelRegistry load_registry(const fs::path& dir) {
  const json manifest = read_manifest(dir / "manifest.json");
  if (!manifest.is_object() || !manifest.contains("models") || !manifest.at("models").is_array()) {
    throw ConfigError("manifest needs a \"models\" array");
  }
  ModelRegistry reg;
  for (const auto& m : manifest.at("models")) {
    RegistryEntry e;
    try {
      e.id = m.at("id").get<std::string>();
      e.artifact = dir / m.at("artifact").get<std::string>();
    } catch (const json::exception& ex) {
      throw ConfigError(std::string("manifest entry lacks id or artifact: ") + ex.what());
    }
    LoadedPipeline loaded = load_pipeline(e.artifact);
    e.features = loaded.pipeline.spec.features.kind;
    e.family = loaded.pipeline.spec.family;
    if (m.contains("features") && parse_feature_kind(m.at("features").get<std::string>()) != e.features) {
      throw ConfigError("manifest entry '" + e.id + "' names features the artifact does not have");
    }
    if (m.contains("family") && parse_model_family(m.at("family").get<std::string>()) != e.family) {
      throw ConfigError("manifest entry '" + e.id + "' names a family the artifact does not have");
    }
    std::optional<double> cv_f1 = number_at(m, "cv_f1");
    if (!cv_f1) {
      const json& info = loaded.metadata.contains("info") ? loaded.metadata.at("info") : json::object();
      if (info.contains("cv_f1") && info.at("cv_f1").is_number()) cv_f1 = info.at("cv_f1").get<double>();
    }
    const std::optional<double> weight = number_at(m, "weight");
    if (!weight && !cv_f1) {
      throw ConfigError("manifest entry '" + e.id + "' has neither weight nor cv_f1");
    }
    e.cv_f1 = cv_f1.value_or(0.0);
    e.weight = weight ? *weight : *cv_f1;
    e.pipeline = std::make_shared<const FittedPipeline>(std::move(loaded.pipeline));
    reg.entries.push_back(std::move(e));
  }
  reg.validate();
  return reg;
}

void register_artifact(const fs::path& dir, const json& entry) {
  if (!entry.contains("id") || !entry.contains("artifact")) {
    throw ValidationError("registry entry needs id and artifact");
  }
  const fs::path file = dir / "manifest.json";
  json manifest = fs::exists(file) ? read_manifest(file) : json{{"models", json::array()}};
  auto& models = manifest["models"];
  bool replaced = false;
  for (auto& m : models) {
    if (m.value("id", "") == entry.at("id").get<std::string>()) {
      m = entry;
      replaced = true;
    }
  }
  if (!replaced) models.push_back(entry);
  fs::create_directories(dir);
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << '\n';
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, file);
}

}  // namespace newscheck
