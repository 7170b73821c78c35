#include <charconv>
#include <cmath>
#include <set>

#include "newscheck/classifiers.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError("parameter " + key + " expects a number, got '" + text + "'");
  }
  return v;
}

long long to_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("parameter " + key + " expects an integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("parameter " + key + " expects true/false, got '" + text + "'");
}

// Reads known keys and rejects the rest.
class ParamReader {
 public:
  ParamReader(ModelFamily family, const ParamMap& params) : family_(family), params_(params) {}

  template <class F>
  void read(const std::string& key, F&& apply) {
    seen_.insert(key);
    auto it = params_.find(key);
    if (it != params_.end()) apply(it->second);
  }
  void finish() const {
    for (const auto& [k, v] : params_) {
      if (!seen_.count(k)) {
        throw ConfigError("unknown parameter '" + k + "' for model " + std::string(to_string(family_)));
      }
    }
  }

 private:
  ModelFamily family_;
  const ParamMap& params_;
  std::set<std::string> seen_;
};

void check_row(std::size_t dim, const SparseRow& x) {
  if (x.nnz() > 0 && x.indices.back() >= dim) {
    throw ValidationError("feature index " + std::to_string(x.indices.back()) + " outside model dimension " +
                          std::to_string(dim));
  }
}

}  // namespace

ModelFamily family_of(const ClassifierModel& model) {
  return std::visit(Overloaded{[](const LogRegModel&) { return ModelFamily::LogReg; },
                               [](const SvmModel&) { return ModelFamily::Svm; },
                               [](const ForestModel&) { return ModelFamily::RandomForest; },
                               [](const AdaBoostModel&) { return ModelFamily::AdaBoost; },
                               [](const GbdtModel&) { return ModelFamily::Gbdt; }},
                    model);
}

std::size_t dimension(const ClassifierModel& model) {
  return std::visit([](const auto& m) { return m.dimension(); }, model);
}

ProbPair predict_proba(const ClassifierModel& model, const SparseRow& x) {
  check_row(dimension(model), x);
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

ProbPair predict_proba(const ClassifierModel& model, std::span<const double> x) {
  if (x.size() != dimension(model)) {
    throw ValidationError("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                          std::to_string(dimension(model)));
  }
  const auto v = SparseVector::from_dense(x);
  return std::visit([&](const auto& m) { return m.predict(SparseRow{v.indices, v.values}); }, model);
}

ClassifierModel train_model(ModelFamily family, const LabeledMatrix& data, const ParamMap& params,
                            std::uint64_t seed) {
  ParamReader r(family, params);
  switch (family) {
    case ModelFamily::LogReg: {
      LogRegParams p;
      r.read("C", [&](const std::string& v) { p.C = to_double("C", v); });
      r.read("penalty", [&](const std::string& v) {
        if (v != "l1") throw ConfigError("logreg supports penalty=l1 only, got '" + v + "'");
      });
      r.read("max_iter", [&](const std::string& v) { p.max_epochs = static_cast<int>(to_int("max_iter", v)); });
      r.read("tol", [&](const std::string& v) { p.tol = to_double("tol", v); });
      r.finish();
      return train_logreg(data, p);
    }
    case ModelFamily::Svm: {
      SvmParams p;
      r.read("C", [&](const std::string& v) { p.C = to_double("C", v); });
      r.read("gamma", [&](const std::string& v) { p.gamma = to_double("gamma", v); });
      r.read("kernel", [&](const std::string& v) {
        if (v != "rbf") throw ConfigError("svm supports kernel=rbf only, got '" + v + "'");
      });
      r.read("tol", [&](const std::string& v) { p.tol = to_double("tol", v); });
      r.read("cache_mb", [&](const std::string& v) { p.cache_mb = to_double("cache_mb", v); });
      r.finish();
      return train_svm(data, p);
    }
    case ModelFamily::RandomForest: {
      ForestParams p;
      p.seed = seed;
      r.read("n_estimators", [&](const std::string& v) { p.n_estimators = static_cast<int>(to_int("n_estimators", v)); });
      r.read("seed", [&](const std::string& v) { p.seed = static_cast<std::uint64_t>(to_int("seed", v)); });
      r.read("bootstrap", [&](const std::string& v) { p.bootstrap = to_bool("bootstrap", v); });
      r.read("max_features", [&](const std::string& v) {
        p.max_features = v == "sqrt" ? 0 : static_cast<std::size_t>(to_int("max_features", v));
      });
      r.finish();
      return train_random_forest(data, p);
    }
    case ModelFamily::AdaBoost: {
      AdaBoostParams p;
      r.read("n_estimators", [&](const std::string& v) { p.n_estimators = static_cast<int>(to_int("n_estimators", v)); });
      r.read("learning_rate", [&](const std::string& v) { p.learning_rate = to_double("learning_rate", v); });
      r.finish();
      return train_adaboost(data, p);
    }
    case ModelFamily::Gbdt: {
      GbdtParams p;
      r.read("n_estimators", [&](const std::string& v) { p.n_estimators = static_cast<int>(to_int("n_estimators", v)); });
      r.read("learning_rate", [&](const std::string& v) { p.learning_rate = to_double("learning_rate", v); });
      r.read("max_depth", [&](const std::string& v) { p.max_depth = static_cast<int>(to_int("max_depth", v)); });
      r.read("max_bin", [&](const std::string& v) { p.max_bins = static_cast<int>(to_int("max_bin", v)); });
      r.read("min_data_in_leaf",
             [&](const std::string& v) { p.min_data_in_leaf = static_cast<int>(to_int("min_data_in_leaf", v)); });
      r.read("lambda_l2", [&](const std::string& v) { p.lambda_l2 = to_double("lambda_l2", v); });
      r.read("num_leaves", [&](const std::string& v) { p.num_leaves = static_cast<int>(to_int("num_leaves", v)); });
      r.read("growth", [&](const std::string& v) {
        if (v == "leafwise") p.leaf_wise = true;
        else if (v == "depthwise") p.leaf_wise = false;
        else throw ConfigError("growth expects depthwise or leafwise, got '" + v + "'");
      });
      r.finish();
      return train_gbdt(data, p);
    }
  }
  throw ConfigError("unsupported model family");
}

ParamMap model_params(const ClassifierModel& model) {
  return std::visit(
      Overloaded{
          [](const LogRegModel& m) { return ParamMap{{"C", fmt(m.params.C)}, {"penalty", "l1"}}; },
          [](const SvmModel& m) {
            return ParamMap{{"C", fmt(m.params.C)}, {"gamma", fmt(m.params.gamma)}, {"kernel", "rbf"}};
          },
          [](const ForestModel& m) {
            return ParamMap{{"n_estimators", std::to_string(m.params.n_estimators)}};
          },
          [](const AdaBoostModel& m) {
            return ParamMap{{"learning_rate", fmt(m.params.learning_rate)},
                            {"n_estimators", std::to_string(m.params.n_estimators)}};
          },
          [](const GbdtModel& m) {
            ParamMap p{{"learning_rate", fmt(m.params.learning_rate)},
                       {"max_depth", std::to_string(m.params.max_depth)},
                       {"n_estimators", std::to_string(m.params.n_estimators)}};
            if (m.params.leaf_wise) p["growth"] = "leafwise";
            return p;
          }},
      model);
}

}  // namespace newscheck
