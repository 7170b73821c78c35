#include "newscheck/metrics.hpp"

#include "newscheck/error.hpp"

namespace newscheck {

std::string_view to_string(PositiveClass positive) { return positive == PositiveClass::Fake ? "fake" : "true"; }

PositiveClass parse_positive_class(std::string_view text) {
  if (text == "fake") return PositiveClass::Fake;
  if (text == "true") return PositiveClass::True;
  throw ConfigError("positive class must be 'fake' or 'true', got '" + std::string(text) + "'");
}

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred, PositiveClass positive) {
  if (y_true.size() != y_pred.size()) {
    throw ValidationError("label vectors differ in length (" + std::to_string(y_true.size()) + " vs " +
                          std::to_string(y_pred.size()) + ")");
  }
  const Label pos = positive == PositiveClass::Fake ? Label::Fake : Label::True;
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == Label::Unknown || y_pred[i] == Label::Unknown) {
      throw ValidationError("metrics need Fake/True labels only");
    }
    const bool t = y_true[i] == pos;
    const bool p = y_pred[i] == pos;
    if (t && p) ++cm.tp;
    else if (!t && p) ++cm.fp;
    else if (t && !p) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

Metrics metrics_from(const ConfusionMatrix& cm, PositiveClass positive) {
  Metrics m;
  m.positive = positive;
  const auto d = [](std::size_t v) { return static_cast<double>(v); };
  if (cm.total() > 0) m.accuracy = d(cm.tp + cm.tn) / d(cm.total());
  if (cm.tp + cm.fp > 0) m.precision = d(cm.tp) / d(cm.tp + cm.fp);
  if (cm.tp + cm.fn > 0) m.recall = d(cm.tp) / d(cm.tp + cm.fn);
  if (m.precision + m.recall > 0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Metrics compute_metrics(std::span<const Label> y_true, std::span<const Label> y_pred, PositiveClass positive) {
  if (y_true.empty()) throw ValidationError("metrics need at least one prediction");
  return metrics_from(confusion(y_true, y_pred, positive), positive);
}

}  // namespace newscheck
