#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "newscheck/evaluation.hpp"

namespace newscheck {

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const CvReport& r);
nlohmann::json to_json(std::span<const CvReport> reports);
nlohmann::json to_json(std::span<const SourceScore> scores);

/// Aligned columns: Models, Best parameters, Accuracy (%), F1 (%), Precision (%),
/// Recall (%), Features. Percentages carry two decimals.
std::string format_table(std::span<const CvReport> reports);
std::string format_source_table(std::span<const SourceScore> scores);

/// The fifteen model x feature configurations with the published best parameters.
std::vector<PipelineSpec> comparison_preset();

}  // namespace newscheck
