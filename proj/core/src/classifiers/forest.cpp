#include <cmath>

#include "classifiers/cart.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

ProbPair ForestModel::predict(const SparseRow& x) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return ProbPair::from_fake(trees.empty() ? 0.5 : s / static_cast<double>(trees.size()));
}

ForestModel train_random_forest(const LabeledMatrix& data, const ForestParams& params) {
  data.validate();
  if (params.n_estimators < 1) throw ValidationError("random forest needs n_estimators >= 1");
  const std::size_t n = data.size();
  const std::size_t d = data.dimension();
  const std::size_t max_features =
      params.max_features > 0 ? params.max_features
                              : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));

  ForestModel model;
  model.params = params;
  model.dim = d;
  model.trees.reserve(static_cast<std::size_t>(params.n_estimators));
  std::vector<std::uint32_t> weights(n);
  for (int t = 0; t < params.n_estimators; ++t) {
    Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(t)));
    if (params.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0u);
      for (std::size_t k = 0; k < n; ++k) ++weights[rng.below(n)];
    } else {
      std::fill(weights.begin(), weights.end(), 1u);
    }
    model.trees.push_back(detail::grow_cart(data.x, data.y, weights, max_features, rng));
  }
  return model;
}

}  // namespace newscheck
