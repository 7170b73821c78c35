#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "newscheck/corpus.hpp"

namespace newscheck {

enum class PositiveClass { Fake, True };

std::string_view to_string(PositiveClass positive);
PositiveClass parse_positive_class(std::string_view text);

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  PositiveClass positive = PositiveClass::Fake;

  bool operator==(const Metrics&) const = default;
};

/// Labels other than Fake/True are rejected.
ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred,
                          PositiveClass positive = PositiveClass::Fake);

/// Precision, recall and F1 are 0 when their denominators are 0.
Metrics metrics_from(const ConfusionMatrix& cm, PositiveClass positive = PositiveClass::Fake);

/// Throws ValidationError on length mismatch or empty input.
Metrics compute_metrics(std::span<const Label> y_true, std::span<const Label> y_pred,
                        PositiveClass positive = PositiveClass::Fake);

}  // namespace newscheck
