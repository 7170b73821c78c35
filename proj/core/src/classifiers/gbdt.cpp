#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "newscheck/classifiers.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

double GbdtModel::raw_score(const SparseRow& x) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return base_score + params.learning_rate * s;
}

ProbPair GbdtModel::predict(const SparseRow& x) const { return ProbPair::from_fake(sigmoid(raw_score(x))); }

namespace {

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

// Per-feature bin boundaries over training values, absent entries counting as 0.
struct Binning {
  std::vector<std::uint32_t> used;          // original feature ids with bins
  std::vector<std::int32_t> used_of;        // feature -> position in `used`, or -1
  std::vector<std::size_t> offset;          // first global bin of each used feature
  std::vector<std::uint32_t> bin_feature;   // global bin -> used position
  std::vector<double> upper;                // global bin -> inclusive upper bound
  std::vector<std::uint32_t> zero_bin;      // used position -> global bin holding 0

  std::size_t total() const { return upper.size(); }
};

Binning build_bins(const SparseMatrix& x, const GbdtParams& params) {
  const ColumnIndex cols(x);
  const std::size_t n = x.rows();
  Binning b;
  b.used_of.assign(x.cols(), -1);
  std::vector<std::pair<double, std::size_t>> distinct;
  std::vector<double> values;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    values.clear();
    for (auto k = cols.col_ptr[f]; k < cols.col_ptr[f + 1]; ++k) {
      if (cols.values[k] != 0.0) values.push_back(cols.values[k]);
    }
    if (values.size() < static_cast<std::size_t>(params.min_data_in_leaf)) continue;
    std::sort(values.begin(), values.end());
    distinct.clear();
    const std::size_t zeros = n - values.size();
    bool zero_added = zeros == 0;
    for (double v : values) {
      if (!zero_added && v > 0.0) {
        distinct.emplace_back(0.0, zeros);
        zero_added = true;
      }
      if (!distinct.empty() && distinct.back().first == v) {
        ++distinct.back().second;
      } else {
        distinct.emplace_back(v, 1);
      }
    }
    if (!zero_added) distinct.emplace_back(0.0, zeros);
    if (distinct.size() < 2) continue;

    // Bin boundaries: index in `distinct` of the last value of each bin.
    std::vector<std::size_t> ends;
    const auto max_bins = static_cast<std::size_t>(params.max_bins);
    if (distinct.size() <= max_bins) {
      for (std::size_t k = 0; k < distinct.size(); ++k) ends.push_back(k);
    } else {
      const double target = static_cast<double>(values.size()) / static_cast<double>(max_bins - 1);
      double acc = 0.0;
      for (std::size_t k = 0; k < distinct.size(); ++k) {
        const bool is_zero = distinct[k].first == 0.0;
        const bool next_zero = k + 1 < distinct.size() && distinct[k + 1].first == 0.0;
        if (!is_zero) acc += static_cast<double>(distinct[k].second);
        const bool last = k + 1 == distinct.size();
        if (last || is_zero || next_zero || (acc >= target && ends.size() + 2 < max_bins)) {
          ends.push_back(k);
          acc = 0.0;
        }
      }
    }

    const auto pos = static_cast<std::uint32_t>(b.used.size());
    b.used_of[f] = static_cast<std::int32_t>(pos);
    b.used.push_back(static_cast<std::uint32_t>(f));
    b.offset.push_back(b.upper.size());
    for (std::size_t e = 0; e < ends.size(); ++e) {
      const double up = e + 1 < ends.size() ? midpoint(distinct[ends[e]].first, distinct[ends[e] + 1].first)
                                            : std::numeric_limits<double>::infinity();
      b.upper.push_back(up);
      b.bin_feature.push_back(pos);
    }
    const auto first = b.upper.begin() + static_cast<std::ptrdiff_t>(b.offset.back());
    b.zero_bin.push_back(static_cast<std::uint32_t>(std::lower_bound(first, b.upper.end(), 0.0) - b.upper.begin()));
  }
  b.offset.push_back(b.upper.size());
  return b;
}

struct Split {
  double gain = 0.0;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  bool valid = false;
};

struct Candidate {
  std::size_t node;
  std::size_t begin;
  std::size_t end;
  int depth;
  double g;
  double h;
  Split split;
};

class TreeBuilder {
 public:
  TreeBuilder(const SparseMatrix& x, const Binning& bins, const GbdtParams& params)
      : x_(x), bins_(bins), params_(params), row_bins_ptr_{0}, hg_(bins.total()), hh_(bins.total()),
        hc_(bins.total(), 0) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto r = x.row(i);
      for (std::size_t k = 0; k < r.nnz(); ++k) {
        const auto u = bins.used_of[r.indices[k]];
        if (u < 0 || r.values[k] == 0.0) continue;
        const auto b = bins.upper.begin() + static_cast<std::ptrdiff_t>(bins.offset[static_cast<std::size_t>(u)]);
        const auto e = bins.upper.begin() + static_cast<std::ptrdiff_t>(bins.offset[static_cast<std::size_t>(u) + 1]);
        row_bins_.push_back(static_cast<std::uint32_t>(std::lower_bound(b, e, r.values[k]) - bins.upper.begin()));
      }
      row_bins_ptr_.push_back(row_bins_.size());
    }
  }

  /// Fits one tree to (grad, hess); returns it and writes the leaf value of every row.
  DecisionTree build(const std::vector<double>& grad, const std::vector<double>& hess, std::vector<double>& leaf_value) {
    grad_ = &grad;
    hess_ = &hess;
    const std::size_t n = x_.rows();
    rows_.resize(n);
    for (std::size_t i = 0; i < n; ++i) rows_[i] = static_cast<std::uint32_t>(i);

    DecisionTree tree;
    tree.nodes.emplace_back();
    Candidate root{0, 0, n, 0, 0.0, 0.0, {}};
    for (std::size_t i = 0; i < n; ++i) {
      root.g += grad[i];
      root.h += hess[i];
    }
    std::vector<Candidate> leaves;

    auto finalize = [&](const Candidate& c) {
      const double v = -c.g / (c.h + params_.lambda_l2);
      tree.nodes[c.node].value = v;
      for (std::size_t k = c.begin; k < c.end; ++k) leaf_value[rows_[k]] = v;
    };
    auto split_node = [&](const Candidate& c, Candidate& left, Candidate& right) {
      const auto mid = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(c.begin),
                                      rows_.begin() + static_cast<std::ptrdiff_t>(c.end), [&](std::uint32_t r) {
                                        return x_.row(r).at(c.split.feature) <= c.split.threshold;
                                      });
      const auto m = static_cast<std::size_t>(mid - rows_.begin());
      const auto l = tree.nodes.size();
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[c.node];
      node.feature = static_cast<std::int32_t>(c.split.feature);
      node.threshold = c.split.threshold;
      node.left = static_cast<std::int32_t>(l);
      node.right = static_cast<std::int32_t>(l + 1);
      left = {l, c.begin, m, c.depth + 1, 0.0, 0.0, {}};
      right = {l + 1, m, c.end, c.depth + 1, 0.0, 0.0, {}};
      for (std::size_t k = c.begin; k < m; ++k) {
        left.g += grad[rows_[k]];
        left.h += hess[rows_[k]];
      }
      for (std::size_t k = m; k < c.end; ++k) {
        right.g += grad[rows_[k]];
        right.h += hess[rows_[k]];
      }
    };

    if (!params_.leaf_wise) {
      std::vector<Candidate> level{root};
      while (!level.empty()) {
        std::vector<Candidate> next;
        for (auto& c : level) {
          if (c.depth < params_.max_depth) c.split = best_split(c);
          if (!c.split.valid) {
            finalize(c);
            continue;
          }
          Candidate l, r;
          split_node(c, l, r);
          next.push_back(l);
          next.push_back(r);
        }
        level.swap(next);
      }
    } else {
      auto cmp = [](const Candidate& a, const Candidate& b) {
        return a.split.gain != b.split.gain ? a.split.gain < b.split.gain : a.node > b.node;
      };
      std::priority_queue<Candidate, std::vector<Candidate>, decltype(cmp)> queue(cmp);
      std::vector<Candidate> done;
      root.split = best_split(root);
      queue.push(root);
      int n_leaves = 1;
      while (!queue.empty()) {
        Candidate c = queue.top();
        queue.pop();
        if (!c.split.valid || n_leaves >= params_.num_leaves) {
          done.push_back(c);
          continue;
        }
        Candidate l, r;
        split_node(c, l, r);
        ++n_leaves;
        for (Candidate* child : {&l, &r}) {
          if (child->depth < params_.max_depth) child->split = best_split(*child);
          queue.push(*child);
        }
      }
      for (const auto& c : done) finalize(c);
    }
    return tree;
  }

 private:
  Split best_split(const Candidate& c) {
    const auto& grad = *grad_;
    const auto& hess = *hess_;
    const auto min_data = static_cast<std::size_t>(params_.min_data_in_leaf);
    const std::size_t count = c.end - c.begin;
    Split best;
    if (count < 2 * min_data) return best;

    touched_.clear();
    for (std::size_t k = c.begin; k < c.end; ++k) {
      const auto r = rows_[k];
      for (auto p = row_bins_ptr_[r]; p < row_bins_ptr_[r + 1]; ++p) {
        const auto gb = row_bins_[p];
        if (hc_[gb] == 0) {
          touched_.push_back(gb);
          hg_[gb] = 0.0;
          hh_[gb] = 0.0;
        }
        hg_[gb] += grad[r];
        hh_[gb] += hess[r];
        ++hc_[gb];
      }
    }
    std::sort(touched_.begin(), touched_.end());

    const double lambda = params_.lambda_l2;
    const double parent = c.g * c.g / (c.h + lambda);
    std::size_t t = 0;
    while (t < touched_.size()) {
      const auto u = bins_.bin_feature[touched_[t]];
      std::size_t e = t;
      double pg = 0.0, ph = 0.0;
      std::size_t pc = 0;
      for (; e < touched_.size() && bins_.bin_feature[touched_[e]] == u; ++e) {
        pg += hg_[touched_[e]];
        ph += hh_[touched_[e]];
        pc += hc_[touched_[e]];
      }
      const auto zb = bins_.zero_bin[u];
      const double zg = c.g - pg, zh = c.h - ph;
      const std::size_t zc = count - pc;

      // Nonempty bins in order, the zero bin spliced in.
      double lg = 0.0, lh = 0.0;
      std::size_t lc = 0;
      bool zero_done = zc == 0;
      std::size_t k = t;
      auto step = [&](std::uint32_t gb, double g, double h, std::size_t n_bin) {
        lg += g;
        lh += h;
        lc += n_bin;
        const std::size_t rc = count - lc;
        if (rc == 0) return;
        if (lc < min_data || rc < min_data) return;
        const double rg = c.g - lg, rh = c.h - lh;
        if (lh < params_.min_sum_hessian || rh < params_.min_sum_hessian) return;
        const double gain = lg * lg / (lh + lambda) + rg * rg / (rh + lambda) - parent;
        if (gain > best.gain) {
          best = {gain, bins_.used[u], bins_.upper[gb], true};
        }
      };
      while (k < e || !zero_done) {
        if (!zero_done && (k == e || touched_[k] > zb)) {
          step(zb, zg, zh, zc);
          zero_done = true;
        } else {
          step(touched_[k], hg_[touched_[k]], hh_[touched_[k]], hc_[touched_[k]]);
          ++k;
        }
      }
      t = e;
    }
    for (auto gb : touched_) hc_[gb] = 0;
    return best;
  }

  const SparseMatrix& x_;
  const Binning& bins_;
  const GbdtParams& params_;
  std::vector<std::size_t> row_bins_ptr_;
  std::vector<std::uint32_t> row_bins_;
  std::vector<double> hg_, hh_;
  std::vector<std::uint32_t> hc_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint32_t> rows_;
  const std::vector<double>* grad_ = nullptr;
  const std::vector<double>* hess_ = nullptr;
};

}  // namespace

GbdtModel train_gbdt(const LabeledMatrix& data, const GbdtParams& params) {
  data.validate();
  if (params.n_estimators < 0) throw ValidationError("gbdt n_estimators must be >= 0");
  if (!(params.learning_rate > 0.0)) throw ValidationError("gbdt learning_rate must be positive");
  if (params.max_depth < 1) throw ValidationError("gbdt max_depth must be >= 1");
  if (params.max_bins < 2) throw ValidationError("gbdt max_bins must be >= 2");
  if (params.min_data_in_leaf < 1) throw ValidationError("gbdt min_data_in_leaf must be >= 1");
  if (params.leaf_wise && params.num_leaves < 2) throw ValidationError("gbdt num_leaves must be >= 2");
  const std::size_t n = data.size();

  GbdtModel model;
  model.params = params;
  model.dim = data.dimension();
  double positives = 0.0;
  for (int label : data.y) positives += label;
  const double prevalence = positives / static_cast<double>(n);
  model.base_score = std::log(prevalence / (1.0 - prevalence));
  if (params.n_estimators == 0) return model;

  const Binning bins = build_bins(data.x, params);
  TreeBuilder builder(data.x, bins, params);
  std::vector<double> score(n, model.base_score), grad(n), hess(n), leaf(n);
  for (int m = 0; m < params.n_estimators; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(score[i]);
      grad[i] = p - data.y[i];
      hess[i] = p * (1.0 - p);
    }
    model.trees.push_back(builder.build(grad, hess, leaf));
    for (std::size_t i = 0; i < n; ++i) score[i] += params.learning_rate * leaf[i];
  }
  return model;
}

}  // namespace newscheck
