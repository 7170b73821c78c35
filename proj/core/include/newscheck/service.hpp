#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "newscheck/artifact.hpp"
#include "newscheck/error.hpp"
#include "newscheck/pipeline.hpp"

namespace newscheck {

struct RegistryEntry {
  std::string id;
  FeatureKind features = FeatureKind::Tfidf;
  ModelFamily family = ModelFamily::LogReg;
  std::filesystem::path artifact;
  double weight = 0.0;
  double cv_f1 = 0.0;
  std::shared_ptr<const FittedPipeline> pipeline;
};

/// Immutable once loaded; serving order is manifest order.
struct ModelRegistry {
  std::vector<RegistryEntry> entries;

  /// Throws ConfigError: empty, duplicate ids, negative or non-finite weights, all zero.
  void validate() const;
};

/// Reads `<dir>/manifest.json`:
///
///   {"models": [{"id": "gbdt-tfidf", "artifact": "gbdt-tfidf.nwc",
///                "weight": 1.0, "cv_f1": 0.96}, ...]}
///
/// "features" and "family" may be given and must then agree with the artifact.
/// cv_f1 falls back to the artifact's info.cv_f1; weight falls back to cv_f1.
/// Artifact failures are FormatError naming the file.
ModelRegistry load_registry(const std::filesystem::path& dir);

/// Adds or replaces the manifest entry with the same id, creating the manifest if needed.
void register_artifact(const std::filesystem::path& dir, const nlohmann::json& entry);

struct Verdict {
  std::string id;
  FeatureKind features = FeatureKind::Tfidf;
  ModelFamily family = ModelFamily::LogReg;
  double weight = 0.0;
  double p_fake = 0.0;
  double p_true = 0.0;
};

struct OmittedModel {
  std::string id;
  std::string error;
};

struct VerifyResponse {
  std::vector<Verdict> verdicts;
  std::vector<OmittedModel> omitted;
  double weighted_average_p_true = 0.0;
  std::size_t model_count = 0;
  double elapsed_ms = 0.0;
};

/// Percentage with two decimals, e.g. 0.75639 -> 75.64.
double percent_2dp(double p);

/// Runs every entry's pipeline on `text`. Throws ValidationError when the text has
/// no words, and Error when every entry fails or the included weights sum to zero.
VerifyResponse verify(std::string_view text, const ModelRegistry& registry);

nlohmann::json to_json(const VerifyResponse& response);
/// ids, families, feature kinds and weights in serving order.
nlohmann::json registry_summary(const ModelRegistry& registry);
/// Plain-text table for the CLI.
std::string format_verify_table(const VerifyResponse& response);

struct ServerOptions {
  /// Directory served at "/" (the web page), when set.
  std::optional<std::filesystem::path> static_dir;
  std::string cors_origin = "*";
  /// Request body cap in bytes.
  std::size_t max_body = 1 << 20;
};

/// HTTP front end: POST /api/verify, GET /api/models, GET /health, CORS on all.
class Server {
 public:
  Server(std::shared_ptr<const ModelRegistry> registry, ServerOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds; port 0 picks a free port. Throws Error when the address is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void listen();
  void stop();
  bool running() const;
  /// Swaps the whole registry; requests in flight finish on the old one.
  void reload(std::shared_ptr<const ModelRegistry> registry);
  std::shared_ptr<const ModelRegistry> registry() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// "host:port" -> pair. Throws ValidationError.
std::pair<std::string, int> parse_bind_address(std::string_view text);

}  // namespace newscheck
