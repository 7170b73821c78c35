#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "newscheck/sparse.hpp"

namespace newscheck {

/// Feature rows with binary labels: 1 = fake (the positive class), 0 = true.
struct LabeledMatrix {
  SparseMatrix x;
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
  std::size_t dimension() const { return x.cols(); }
  /// Throws ValidationError on shape mismatch, labels outside {0,1}, non-finite
  /// values, or (when require_both_classes) a single-class set.
  void validate(bool require_both_classes = true) const;
};

struct ProbPair {
  double p_fake = 0.5;
  double p_true = 0.5;

  static ProbPair from_fake(double p_fake);
};

double sigmoid(double z);
/// log(1 + exp(z)) without overflow.
double softplus(double z);
/// Logistic loss of margin z for label y in {0,1}: softplus(z) - y*z.
double logistic_loss(double z, int y);

enum class ModelFamily { LogReg, Svm, RandomForest, AdaBoost, Gbdt };

/// "logreg", "svm", "rf", "adaboost", "gbdt".
std::string_view to_string(ModelFamily family);
ModelFamily parse_model_family(std::string_view text);
/// Human name used in reports ("Logistic Regression", ...).
std::string_view display_name(ModelFamily family);

// --------------------------------------------------------------- logistic

struct LogRegParams {
  double C = 1.0;
  int max_epochs = 1000;
  /// Stop when the relative objective decrease falls below this.
  double tol = 1e-6;
};

/// L1-penalized logistic regression; objective C * sum(logloss) + |w|_1.
/// The bias is not penalized.
struct LogRegModel {
  DenseVector weights;
  double bias = 0.0;
  LogRegParams params;
  int epochs_run = 0;

  std::size_t dimension() const { return weights.size(); }
  double decision(const SparseRow& x) const;
  ProbPair predict(const SparseRow& x) const;
};

LogRegModel train_logreg(const LabeledMatrix& data, const LogRegParams& params = {});
/// C * sum_i logloss(w.x_i + b, y_i) + |w|_1.
double logreg_objective(const LabeledMatrix& data, const LogRegModel& model);

// -------------------------------------------------------------------- svm

struct SvmParams {
  double C = 1.0;
  double gamma = 0.001;
  double tol = 1e-3;
  double cache_mb = 256.0;
  std::size_t max_iterations = 10'000'000;
};

/// RBF soft-margin SVM. Decision f(x) = sum_i dual_coefs[i] K(sv_i, x) + intercept,
/// where dual_coefs[i] = alpha_i * y_i with y = +1 for fake. p_fake is the Platt
/// sigmoid 1 / (1 + exp(platt_a * f + platt_b)).
struct SvmModel {
  SparseMatrix support_vectors;
  DenseVector dual_coefs;
  /// Training-row index of each support vector.
  std::vector<std::size_t> support_indices;
  double intercept = 0.0;
  double platt_a = -1.0;
  double platt_b = 0.0;
  SvmParams params;
  std::size_t dim = 0;
  std::size_t iterations = 0;

  std::size_t dimension() const { return dim; }
  double decision(const SparseRow& x) const;
  ProbPair predict(const SparseRow& x) const;
};

SvmModel train_svm(const LabeledMatrix& data, const SvmParams& params = {});
double rbf_kernel(const SparseRow& a, const SparseRow& b, double gamma);
/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij (to maximize).
double svm_dual_objective(const LabeledMatrix& data, std::span<const double> alpha, double gamma);
/// Platt fit (Newton with backtracking) on decision values; labels 1 = positive.
std::pair<double, double> fit_platt(std::span<const double> decision, std::span<const int> labels);

// ------------------------------------------------------------------ trees

/// Binary tree; internal nodes send x[feature] <= threshold to the left.
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf payload
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  double predict(const SparseRow& x) const;
  /// Index of the leaf reached by x.
  std::size_t leaf_of(const SparseRow& x) const;
  int depth() const;
  std::size_t leaf_count() const;
};

struct ForestParams {
  int n_estimators = 100;
  std::uint64_t seed = 1;
  bool bootstrap = true;
  /// Features examined per split; 0 means floor(sqrt(d)).
  std::size_t max_features = 0;
};

/// Leaves hold the fraction of (bootstrap-weighted) fake rows that reached them.
struct ForestModel {
  std::vector<DecisionTree> trees;
  ForestParams params;
  std::size_t dim = 0;

  std::size_t dimension() const { return dim; }
  ProbPair predict(const SparseRow& x) const;
};

ForestModel train_random_forest(const LabeledMatrix& data, const ForestParams& params = {});

// --------------------------------------------------------------- adaboost

struct AdaBoostParams {
  int n_estimators = 50;
  double learning_rate = 1.0;
};

/// Polarity +1 votes fake (+1) when x[feature] > threshold; polarity -1 votes
/// fake when x[feature] <= threshold. The other side votes true (-1).
struct Stump {
  std::uint32_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;

  int vote(const SparseRow& x) const;
};

/// p_fake = sigmoid(2 F), F = sum_m alpha_m h_m(x).
struct AdaBoostModel {
  std::vector<Stump> stumps;
  std::vector<double> stump_weights;
  /// Weighted training error of each kept stump.
  std::vector<double> stump_errors;
  AdaBoostParams params;
  std::size_t dim = 0;

  std::size_t dimension() const { return dim; }
  double decision(const SparseRow& x) const;
  ProbPair predict(const SparseRow& x) const;
};

/// learning_rate * 1/2 ln((1 - eps) / eps).
double adaboost_alpha(double eps, double learning_rate);
AdaBoostModel train_adaboost(const LabeledMatrix& data, const AdaBoostParams& params = {});

// ------------------------------------------------------------------- gbdt

struct GbdtParams {
  int n_estimators = 100;
  double learning_rate = 0.3;
  int max_depth = 8;
  int max_bins = 255;
  int min_data_in_leaf = 20;
  double lambda_l2 = 1.0;
  double min_sum_hessian = 1e-3;
  /// Best-first growth limited by num_leaves instead of level-by-level growth.
  bool leaf_wise = false;
  int num_leaves = 31;
};

/// p_fake = sigmoid(base_score + learning_rate * sum of tree outputs).
struct GbdtModel {
  std::vector<DecisionTree> trees;
  double base_score = 0.0;
  GbdtParams params;
  std::size_t dim = 0;

  std::size_t dimension() const { return dim; }
  double raw_score(const SparseRow& x) const;
  ProbPair predict(const SparseRow& x) const;
};

GbdtModel train_gbdt(const LabeledMatrix& data, const GbdtParams& params = {});

// ----------------------------------------------------------------- variant

using ClassifierModel = std::variant<LogRegModel, SvmModel, ForestModel, AdaBoostModel, GbdtModel>;

/// Hyperparameters as text, e.g. {"C": "1.0", "penalty": "l1"}.
using ParamMap = std::map<std::string, std::string>;

ModelFamily family_of(const ClassifierModel& model);
std::size_t dimension(const ClassifierModel& model);

/// Throws ValidationError when the row has an index beyond the model's dimension.
ProbPair predict_proba(const ClassifierModel& model, const SparseRow& x);
/// Throws ValidationError unless x.size() equals the model's dimension.
ProbPair predict_proba(const ClassifierModel& model, std::span<const double> x);

/// Trains `family` with `params`; unknown or malformed keys throw ConfigError.
/// `seed` feeds randomized learners unless params carry their own "seed".
ClassifierModel train_model(ModelFamily family, const LabeledMatrix& data, const ParamMap& params,
                            std::uint64_t seed = 1);
/// Canonical, sorted "k=v, ..." rendering of a model's hyperparameters.
ParamMap model_params(const ClassifierModel& model);

}  // namespace newscheck
