#pragma once

#include <cstdint>
#include <vector>

#include "newscheck/classifiers.hpp"
#include "newscheck/random.hpp"

namespace newscheck::detail {

/// Grows an unpruned Gini tree. `weights` are per-row multiplicities (bootstrap
/// counts); rows with weight 0 are out of bag. Each split examines a random
/// subset of the node's non-constant features sized as if `max_features` were
/// drawn from all columns. Leaves hold the weighted fraction of label 1.
DecisionTree grow_cart(const SparseMatrix& x, const std::vector<int>& y, const std::vector<std::uint32_t>& weights,
                       std::size_t max_features, Rng& rng);

}  // namespace newscheck::detail
