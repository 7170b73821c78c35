#include <algorithm>
#include <cmath>

#include "newscheck/classifiers.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

void LabeledMatrix::validate(bool require_both_classes) const {
  if (x.rows() != y.size()) {
    throw ValidationError("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                          std::to_string(y.size()) + ") differ in length");
  }
  if (y.empty()) throw ValidationError("training set is empty");
  std::size_t fake = 0;
  for (int label : y) {
    if (label != 0 && label != 1) throw ValidationError("labels must be 0 (true) or 1 (fake)");
    fake += static_cast<std::size_t>(label);
  }
  if (require_both_classes && (fake == 0 || fake == y.size())) {
    throw ValidationError("training set needs at least one example of each class");
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (double v : x.row(i).values) {
      if (!std::isfinite(v)) throw ValidationError("non-finite feature value in row " + std::to_string(i));
    }
  }
}

ProbPair ProbPair::from_fake(double p_fake) {
  if (std::isnan(p_fake)) throw ValidationError("probability is NaN");
  const double p = std::clamp(p_fake, 0.0, 1.0);
  return {p, 1.0 - p};
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic_loss(double z, int y) { return softplus(z) - (y == 1 ? z : 0.0); }

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::LogReg: return "logreg";
    case ModelFamily::Svm: return "svm";
    case ModelFamily::RandomForest: return "rf";
    case ModelFamily::AdaBoost: return "adaboost";
    case ModelFamily::Gbdt: return "gbdt";
  }
  return "?";
}

ModelFamily parse_model_family(std::string_view text) {
  if (text == "logreg" || text == "lr") return ModelFamily::LogReg;
  if (text == "svm") return ModelFamily::Svm;
  if (text == "rf" || text == "random_forest") return ModelFamily::RandomForest;
  if (text == "adaboost") return ModelFamily::AdaBoost;
  if (text == "gbdt" || text == "lightgbm") return ModelFamily::Gbdt;
  throw ConfigError("unknown model family '" + std::string(text) + "'");
}

std::string_view display_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::LogReg: return "Logistic Regression";
    case ModelFamily::Svm: return "SVM";
    case ModelFamily::RandomForest: return "Random Forest";
    case ModelFamily::AdaBoost: return "AdaBoost";
    case ModelFamily::Gbdt: return "LightGBM";
  }
  return "?";
}

}  // namespace newscheck
