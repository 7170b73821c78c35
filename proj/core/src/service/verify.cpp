#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "newscheck/service.hpp"
#include "newscheck/textprep.hpp"

namespace newscheck {

using nlohmann::json;

double percent_2dp(double p) { return std::round(p * 10000.0) / 100.0; }

VerifyResponse verify(std::string_view text, const ModelRegistry& registry) {
  const auto start = std::chrono::steady_clock::now();
  // Light cleaning only: the question is whether any word is left at all.
  PrepConfig probe;
  probe.terminal_stage = TerminalStage::None;
  if (tokenize(clean(text, probe)).empty()) throw ValidationError("text has no words to verify");

  VerifyResponse r;
  double wsum = 0.0;
  double acc = 0.0;
  for (const auto& e : registry.entries) {
    try {
      const ProbPair p = e.pipeline->predict(text);
      if (!std::isfinite(p.p_true) || p.p_true < 0 || p.p_true > 1) throw Error("probability out of range");
      r.verdicts.push_back({e.id, e.features, e.family, e.weight, p.p_fake, p.p_true});
      wsum += e.weight;
      acc += e.weight * p.p_true;
    } catch (const std::exception& ex) {
      r.omitted.push_back({e.id, ex.what()});
    }
  }
  if (r.verdicts.empty()) throw Error("every model failed on this text");
  if (!(wsum > 0)) throw Error("the models that answered all have zero weight");
  // Clamp guards the last ulp; the mean already lies within [min, max].
  r.weighted_average_p_true = std::clamp(acc / wsum, 0.0, 1.0);
  r.model_count = r.verdicts.size();
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

json to_json(const VerifyResponse& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"id", v.id},
                        {"label", std::string(display_name(v.family)) + " (" + std::string(display_name(v.features)) + ")"},
                        {"family", std::string(to_string(v.family))},
                        {"features", std::string(to_string(v.features))},
                        {"weight", v.weight},
                        {"p_fake", v.p_fake},
                        {"p_true", v.p_true},
                        {"percent_true", percent_2dp(v.p_true)}});
  }
  json omitted = json::array();
  for (const auto& o : r.omitted) omitted.push_back({{"id", o.id}, {"error", o.error}});
  return json{{"verdicts", verdicts},
              {"omitted", omitted},
              {"weighted_average_p_true", r.weighted_average_p_true},
              {"weighted_average_percent_true", percent_2dp(r.weighted_average_p_true)},
              {"model_count", r.model_count},
              {"elapsed_ms", r.elapsed_ms}};
}

json registry_summary(const ModelRegistry& registry) {
  json models = json::array();
  for (const auto& e : registry.entries) {
    models.push_back({{"id", e.id},
                      {"label", std::string(display_name(e.family)) + " (" + std::string(display_name(e.features)) + ")"},
                      {"family", std::string(to_string(e.family))},
                      {"features", std::string(to_string(e.features))},
                      {"weight", e.weight},
                      {"cv_f1", e.cv_f1}});
  }
  return json{{"models", models}};
}

std::string format_verify_table(const VerifyResponse& r) {
  std::size_t width = 16;
  for (const auto& v : r.verdicts) width = std::max(width, v.id.size());
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %8s  %8s  %7s\n", static_cast<int>(width), "Model", "True (%)", "Fake (%)",
                "Weight");
  out += line;
  out += std::string(width + 31, '-') + "\n";
  for (const auto& v : r.verdicts) {
    std::snprintf(line, sizeof line, "%-*s  %8.2f  %8.2f  %7.4f\n", static_cast<int>(width), v.id.c_str(),
                  percent_2dp(v.p_true), percent_2dp(v.p_fake), v.weight);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-*s  %8.2f\n", static_cast<int>(width), "Weighted average",
                percent_2dp(r.weighted_average_p_true));
  out += line;
  for (const auto& o : r.omitted) out += "omitted " + o.id + ": " + o.error + "\n";
  return out;
}

}  // namespace newscheck
