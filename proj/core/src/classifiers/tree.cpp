#include <algorithm>
#include <cmath>

#include "classifiers/cart.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

std::size_t DecisionTree::leaf_of(const SparseRow& x) const {
  std::size_t node = 0;
  while (nodes[node].feature >= 0) {
    const auto& n = nodes[node];
    node = static_cast<std::size_t>(x.at(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left : n.right);
  }
  return node;
}

double DecisionTree::predict(const SparseRow& x) const { return nodes[leaf_of(x)].value; }

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes[i].feature >= 0) {
      stack.emplace_back(static_cast<std::size_t>(nodes[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[i].right), d + 1);
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

namespace detail {

namespace {

struct Entry {
  double value;
  double w0;
  double w1;
};

// Maximizing this over splits minimizes the weighted Gini impurity of the children.
double gini_proxy(double l0, double l1, double r0, double r1) {
  const double wl = l0 + l1, wr = r0 + r1;
  return (l0 * l0 + l1 * l1) / wl + (r0 * r0 + r1 * r1) / wr;
}

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

struct Frame {
  std::size_t node;
  std::size_t begin;
  std::size_t end;
};

}  // namespace

DecisionTree grow_cart(const SparseMatrix& x, const std::vector<int>& y, const std::vector<std::uint32_t>& weights,
                       std::size_t max_features, Rng& rng) {
  const std::size_t d = x.cols();
  std::vector<std::uint32_t> rows;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (weights[i] > 0) rows.push_back(static_cast<std::uint32_t>(i));
  }

  std::vector<std::uint32_t> present(d, 0);
  std::vector<double> first(d, 0.0);
  std::vector<std::uint8_t> varies(d, 0);
  std::vector<std::int32_t> slot(d, -1);
  std::vector<std::uint32_t> touched, candidates, chosen;
  std::vector<std::size_t> offsets;
  std::vector<Entry> entries;

  DecisionTree tree;
  tree.nodes.emplace_back();
  std::vector<Frame> stack{{0, 0, rows.size()}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t k = f.begin; k < f.end; ++k) {
      (y[rows[k]] == 1 ? w1 : w0) += weights[rows[k]];
    }
    tree.nodes[f.node].value = w1 + w0 > 0 ? w1 / (w0 + w1) : 0.5;
    if (w0 == 0.0 || w1 == 0.0) continue;

    const std::size_t n_rows = f.end - f.begin;
    touched.clear();
    for (std::size_t k = f.begin; k < f.end; ++k) {
      const auto r = x.row(rows[k]);
      for (std::size_t e = 0; e < r.nnz(); ++e) {
        const auto c = r.indices[e];
        const double v = r.values[e];
        if (v == 0.0) continue;
        if (present[c] == 0) {
          touched.push_back(c);
          first[c] = v;
        } else if (v != first[c]) {
          varies[c] = 1;
        }
        ++present[c];
      }
    }
    candidates.clear();
    for (auto c : touched) {
      if (varies[c] || present[c] < n_rows) candidates.push_back(c);
    }

    chosen.clear();
    if (!candidates.empty()) {
      // Non-constant features among max_features draws without replacement from all d.
      std::size_t k_draw = 0;
      std::size_t population = d, successes = candidates.size();
      for (std::size_t t = 0; t < std::min(max_features, d); ++t) {
        if (rng.below(population) < successes) {
          ++k_draw;
          --successes;
        }
        --population;
      }
      k_draw = std::max<std::size_t>(1, k_draw);
      for (std::size_t t = 0; t < k_draw; ++t) {
        const std::size_t pick = t + static_cast<std::size_t>(rng.below(candidates.size() - t));
        std::swap(candidates[t], candidates[pick]);
        chosen.push_back(candidates[t]);
      }
    }

    offsets.assign(chosen.size() + 1, 0);
    for (std::size_t s = 0; s < chosen.size(); ++s) {
      slot[chosen[s]] = static_cast<std::int32_t>(s);
      offsets[s + 1] = offsets[s] + present[chosen[s]];
    }
    entries.resize(offsets.back());
    {
      std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
      for (std::size_t k = f.begin; k < f.end && !chosen.empty(); ++k) {
        const auto row = rows[k];
        const auto r = x.row(row);
        const double wt = weights[row];
        for (std::size_t e = 0; e < r.nnz(); ++e) {
          const auto s = slot[r.indices[e]];
          if (s < 0 || r.values[e] == 0.0) continue;
          entries[fill[static_cast<std::size_t>(s)]++] = {r.values[e], y[row] == 1 ? 0.0 : wt, y[row] == 1 ? wt : 0.0};
        }
      }
    }
    for (auto c : touched) {
      present[c] = 0;
      varies[c] = 0;
      slot[c] = -1;
    }

    double best = -1.0;
    std::uint32_t best_feature = 0;
    double best_threshold = 0.0;
    for (std::size_t s = 0; s < chosen.size(); ++s) {
      auto b = entries.begin() + static_cast<std::ptrdiff_t>(offsets[s]);
      auto e = entries.begin() + static_cast<std::ptrdiff_t>(offsets[s + 1]);
      std::sort(b, e, [](const Entry& p, const Entry& q) { return p.value < q.value; });
      double p0 = 0.0, p1 = 0.0;
      for (auto it = b; it != e; ++it) {
        p0 += it->w0;
        p1 += it->w1;
      }
      const Entry zero{0.0, w0 - p0, w1 - p1};
      const bool has_zero = static_cast<std::size_t>(e - b) < n_rows;
      // Walk distinct values in order with the zero group spliced in.
      double l0 = 0.0, l1 = 0.0;
      bool zero_done = !has_zero;
      auto it = b;
      double prev = 0.0;
      bool started = false;
      auto consider = [&](double next_value) {
        if (started && l0 + l1 > 0 && (w0 - l0) + (w1 - l1) > 0) {
          const double score = gini_proxy(l0, l1, w0 - l0, w1 - l1);
          if (score > best) {
            best = score;
            best_feature = chosen[s];
            best_threshold = midpoint(prev, next_value);
          }
        }
      };
      while (it != e || !zero_done) {
        double v;
        if (!zero_done && (it == e || it->value > 0.0)) {
          v = 0.0;
          consider(v);
          l0 += zero.w0;
          l1 += zero.w1;
          zero_done = true;
        } else {
          v = it->value;
          if (!started || v != prev) consider(v);
          for (; it != e && it->value == v; ++it) {
            l0 += it->w0;
            l1 += it->w1;
          }
        }
        prev = v;
        started = true;
      }
    }
    if (best < 0.0) continue;

    const auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(f.begin),
                                    rows.begin() + static_cast<std::ptrdiff_t>(f.end), [&](std::uint32_t r) {
                                      return x.row(r).at(best_feature) <= best_threshold;
                                    });
    const std::size_t split = static_cast<std::size_t>(mid - rows.begin());
    const auto left = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[f.node];
    node.feature = static_cast<std::int32_t>(best_feature);
    node.threshold = best_threshold;
    node.left = static_cast<std::int32_t>(left);
    node.right = static_cast<std::int32_t>(left + 1);
    stack.push_back({left + 1, split, f.end});
    stack.push_back({left, f.begin, split});
  }
  return tree;
}

}  // namespace detail
}  // namespace newscheck
