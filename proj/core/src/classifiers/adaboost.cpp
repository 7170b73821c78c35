#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "newscheck/classifiers.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

int Stump::vote(const SparseRow& x) const {
  const bool left = x.at(feature) <= threshold;
  return (polarity > 0) != left ? 1 : -1;
}

double AdaBoostModel::decision(const SparseRow& x) const {
  double f = 0.0;
  for (std::size_t m = 0; m < stumps.size(); ++m) f += stump_weights[m] * stumps[m].vote(x);
  return f;
}

ProbPair AdaBoostModel::predict(const SparseRow& x) const { return ProbPair::from_fake(sigmoid(2.0 * decision(x))); }

double adaboost_alpha(double eps, double learning_rate) {
  return learning_rate * 0.5 * std::log((1.0 - eps) / eps);
}

namespace {

constexpr double kMinError = 1e-10;

struct SortedColumns {
  std::vector<std::size_t> ptr;
  std::vector<std::uint32_t> rows;
  std::vector<double> values;
};

SortedColumns sort_columns(const SparseMatrix& x) {
  ColumnIndex cols(x);
  SortedColumns out{cols.col_ptr, {}, {}};
  out.rows.resize(cols.row_idx.size());
  out.values.resize(cols.values.size());
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c + 1 < cols.col_ptr.size(); ++c) {
    const auto b = cols.col_ptr[c], e = cols.col_ptr[c + 1];
    order.resize(e - b);
    std::iota(order.begin(), order.end(), b);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return cols.values[p] < cols.values[q]; });
    for (std::size_t k = 0; k < order.size(); ++k) {
      out.rows[b + k] = cols.row_idx[order[k]];
      out.values[b + k] = cols.values[order[k]];
    }
  }
  return out;
}

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

struct StumpFit {
  Stump stump;
  double error = std::numeric_limits<double>::infinity();
};

StumpFit best_stump(const SortedColumns& cols, const std::vector<int>& y, const std::vector<double>& w,
                    std::size_t n_rows, double total0, double total1) {
  StumpFit best;
  for (std::size_t c = 0; c + 1 < cols.ptr.size(); ++c) {
    const auto b = cols.ptr[c], e = cols.ptr[c + 1];
    if (b == e) continue;
    double p0 = 0.0, p1 = 0.0;
    for (auto k = b; k < e; ++k) (y[cols.rows[k]] == 1 ? p1 : p0) += w[cols.rows[k]];
    const bool has_zero = e - b < n_rows;
    const double z0 = total0 - p0, z1 = total1 - p1;

    double l0 = 0.0, l1 = 0.0, prev = 0.0;
    bool started = false, zero_done = !has_zero;
    auto consider = [&](double next) {
      if (!started) return;
      const double err_pos = l1 + (total0 - l0);  // fake on the right
      const double err_neg = l0 + (total1 - l1);  // fake on the left
      if (err_pos < best.error) best = {{static_cast<std::uint32_t>(c), midpoint(prev, next), 1}, err_pos};
      if (err_neg < best.error) best = {{static_cast<std::uint32_t>(c), midpoint(prev, next), -1}, err_neg};
    };
    auto k = b;
    while (k < e || !zero_done) {
      double v;
      if (!zero_done && (k == e || cols.values[k] > 0.0)) {
        v = 0.0;
        consider(v);
        l0 += z0;
        l1 += z1;
        zero_done = true;
      } else {
        v = cols.values[k];
        consider(v);
        for (; k < e && cols.values[k] == v; ++k) (y[cols.rows[k]] == 1 ? l1 : l0) += w[cols.rows[k]];
      }
      prev = v;
      started = true;
    }
  }
  return best;
}

}  // namespace

AdaBoostModel train_adaboost(const LabeledMatrix& data, const AdaBoostParams& params) {
  data.validate();
  if (params.n_estimators < 1) throw ValidationError("adaboost needs n_estimators >= 1");
  if (!(params.learning_rate > 0.0)) throw ValidationError("adaboost learning_rate must be positive");
  const std::size_t n = data.size();
  const SortedColumns cols = sort_columns(data.x);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));

  AdaBoostModel model;
  model.params = params;
  model.dim = data.dimension();
  for (int m = 0; m < params.n_estimators; ++m) {
    double t0 = 0.0, t1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) (data.y[i] == 1 ? t1 : t0) += w[i];
    const StumpFit fit = best_stump(cols, data.y, w, n, t0, t1);
    if (!std::isfinite(fit.error) || fit.error >= 0.5) break;
    const bool perfect = fit.error < kMinError;
    const double eps = perfect ? kMinError : fit.error;
    const double alpha = adaboost_alpha(eps, params.learning_rate);
    model.stumps.push_back(fit.stump);
    model.stump_weights.push_back(alpha);
    model.stump_errors.push_back(eps);
    if (perfect) break;

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = data.y[i] == 1 ? 1.0 : -1.0;
      w[i] *= std::exp(-alpha * yi * fit.stump.vote(data.x.row(i)));
      sum += w[i];
    }
    for (double& v : w) v /= sum;
  }
  return model;
}

}  // namespace newscheck
