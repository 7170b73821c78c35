#pragma once

#include <string>
#include <vector>

#include "newscheck/corpus.hpp"

namespace oracle {

// Empty string when the assignment is disjoint, exhaustive over labeled
// documents, and each class is spread over folds within one member.
inline std::string check_folds(const newscheck::Corpus& corpus, const newscheck::FoldAssignment& folds) {
  using newscheck::Label;
  const int k = folds.k;
  std::vector<std::vector<int>> per_class(2, std::vector<int>(static_cast<std::size_t>(k), 0));
  std::vector<int> seen(corpus.size(), 0);
  for (int f = 0; f < k; ++f) {
    for (auto i : folds.test_indices(f)) {
      if (++seen[i] > 1) return "document in two test folds";
      if (corpus[i].label == Label::Unknown) return "unknown document in a fold";
      per_class[corpus[i].label == Label::Fake ? 0 : 1][static_cast<std::size_t>(f)]++;
    }
    const auto train = folds.train_indices(f);
    const auto test = folds.test_indices(f);
    if (train.size() + test.size() != corpus.labeled_indices().size()) return "train and test do not cover the labeled set";
    for (auto i : train) {
      if (folds.fold_by_index[i] == f) return "train split contains a test document";
    }
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const bool labeled = corpus[i].label != Label::Unknown;
    if (labeled && seen[i] != 1) return "labeled document in no test fold";
  }
  for (const auto& counts : per_class) {
    int lo = counts[0], hi = counts[0];
    for (int c : counts) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (hi - lo > 1) return "class imbalance across folds exceeds one";
  }
  return {};
}

}  // namespace oracle
