#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "newscheck/pipeline.hpp"

namespace newscheck {

/// Single-file container: magic, format version, then named sections each
/// carrying its own SHA-256. Section names end in a version ("tfidf/v1") except
/// the JSON "metadata" section.
struct ArtifactSection {
  std::string name;
  std::string payload;
};

inline constexpr std::uint32_t kArtifactFormatVersion = 1;

std::string encode_artifact(const std::vector<ArtifactSection>& sections);
/// Verifies magic, version, framing and every checksum. Errors are FormatError
/// and mention `label` (usually the file name).
std::vector<ArtifactSection> decode_artifact(std::string_view bytes, const std::string& label = "artifact");

struct LoadedPipeline {
  FittedPipeline pipeline;
  nlohmann::json metadata;
};

/// Sections: metadata, tfidf/v1 or phraser/v1 + w2v/v1, model/<family>/v1.
/// `extra` is merged into the metadata section (cv scores, provenance).
std::string serialize_pipeline(const FittedPipeline& pipeline, const nlohmann::json& extra = nlohmann::json::object());
LoadedPipeline deserialize_pipeline(std::string_view bytes, const std::string& label = "artifact");

void save_pipeline(const std::filesystem::path& path, const FittedPipeline& pipeline,
                   const nlohmann::json& extra = nlohmann::json::object());
LoadedPipeline load_pipeline(const std::filesystem::path& path);

/// Hex SHA-256 of the serialized pipeline without extra metadata.
std::string pipeline_digest(const FittedPipeline& pipeline);

nlohmann::json model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(ModelFamily family, const nlohmann::json& j);

}  // namespace newscheck
