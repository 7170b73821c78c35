#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "newscheck/classifiers.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

double rbf_kernel(const SparseRow& a, const SparseRow& b, double gamma) {
  const double d2 = squared_norm(a) + squared_norm(b) - 2.0 * dot(a, b);
  return std::exp(-gamma * std::max(0.0, d2));
}

double SvmModel::decision(const SparseRow& x) const {
  const double xx = squared_norm(x);
  double f = intercept;
  for (std::size_t i = 0; i < support_vectors.rows(); ++i) {
    const auto sv = support_vectors.row(i);
    const double d2 = squared_norm(sv) + xx - 2.0 * dot(sv, x);
    f += dual_coefs[i] * std::exp(-params.gamma * std::max(0.0, d2));
  }
  return f;
}

ProbPair SvmModel::predict(const SparseRow& x) const {
  return ProbPair::from_fake(sigmoid(-(platt_a * decision(x) + platt_b)));
}

double svm_dual_objective(const LabeledMatrix& data, std::span<const double> alpha, double gamma) {
  const std::size_t n = data.size();
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += alpha[i];
    if (alpha[i] == 0.0) continue;
    const double yi = data.y[i] == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (alpha[j] == 0.0) continue;
      const double yj = data.y[j] == 1 ? 1.0 : -1.0;
      quad += alpha[i] * alpha[j] * yi * yj * rbf_kernel(data.x.row(i), data.x.row(j), gamma);
    }
  }
  return linear - 0.5 * quad;
}

std::pair<double, double> fit_platt(std::span<const double> dec, std::span<const int> labels) {
  const std::size_t n = dec.size();
  double prior1 = 0.0, prior0 = 0.0;
  for (int l : labels) (l == 1 ? prior1 : prior0) += 1.0;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] == 1 ? hi : lo;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * a + b;
      f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  constexpr double kSigma = 1e-12, kEps = 1e-5, kMinStep = 1e-10;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * a + b;
      double p, q;
      if (z >= 0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += dec[i] * dec[i] * d2;
      h22 += d2;
      h21 += dec[i] * d2;
      const double d1 = t[i] - p;
      g1 += dec[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da, nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

namespace {

// Kernel columns with least-recently-used eviction under a byte budget.
class KernelCache {
 public:
  KernelCache(const SparseMatrix& x, double gamma, double budget_mb)
      : x_(x), gamma_(gamma), scratch_(x.cols(), 0.0), sq_(x.rows()) {
    for (std::size_t i = 0; i < x.rows(); ++i) sq_[i] = squared_norm(x.row(i));
    const double bytes = std::max(1.0, budget_mb) * 1024.0 * 1024.0;
    capacity_ = std::max<std::size_t>(2, static_cast<std::size_t>(bytes / (8.0 * std::max<std::size_t>(1, x.rows()))));
  }

  const std::vector<double>& column(std::size_t i) {
    auto it = map_.find(i);
    if (it != map_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    std::vector<double> col;
    if (map_.size() >= capacity_) {
      col = std::move(lru_.back().second);
      map_.erase(lru_.back().first);
      lru_.pop_back();
    }
    col.resize(x_.rows());
    fill(i, col);
    lru_.emplace_front(i, std::move(col));
    map_[i] = lru_.begin();
    return lru_.front().second;
  }

  double diag(std::size_t) const { return 1.0; }

 private:
  void fill(std::size_t i, std::vector<double>& col) {
    const auto xi = x_.row(i);
    for (std::size_t k = 0; k < xi.nnz(); ++k) scratch_[xi.indices[k]] = xi.values[k];
    for (std::size_t j = 0; j < x_.rows(); ++j) {
      const auto xj = x_.row(j);
      double d = 0.0;
      for (std::size_t k = 0; k < xj.nnz(); ++k) d += scratch_[xj.indices[k]] * xj.values[k];
      col[j] = std::exp(-gamma_ * std::max(0.0, sq_[i] + sq_[j] - 2.0 * d));
    }
    for (std::size_t k = 0; k < xi.nnz(); ++k) scratch_[xi.indices[k]] = 0.0;
  }

  const SparseMatrix& x_;
  double gamma_;
  std::vector<double> scratch_;
  std::vector<double> sq_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, std::list<std::pair<std::size_t, std::vector<double>>>::iterator> map_;
};

}  // namespace

// SMO on min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, with Q_ij = y_i y_j K_ij and
// second-order working-set selection.
SvmModel train_svm(const LabeledMatrix& data, const SvmParams& params) {
  data.validate();
  if (!(params.C > 0.0)) throw ValidationError("svm C must be positive");
  if (!(params.gamma > 0.0)) throw ValidationError("svm gamma must be positive");
  const std::size_t n = data.size();
  const double c = params.C;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.y[i] == 1 ? 1.0 : -1.0;

  KernelCache cache(data.x, params.gamma, params.cache_mb);
  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  constexpr double kTau = 1e-12;
  const double eps = params.tol;
  auto upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  std::size_t iter = 0;
  for (; iter < params.max_iterations; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0 ? !upper(t) : !lower(t)) {
        if (-y[t] * grad[t] >= gmax) {
          gmax = -y[t] * grad[t];
          i = t;
        }
      }
    }
    if (i == n) break;
    const auto& ki = cache.column(i);
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0 ? lower(t) : upper(t)) continue;
      const double v = y[t] * grad[t];
      gmax2 = std::max(gmax2, v);
      const double diff = gmax + v;
      if (diff > 0.0) {
        const double quad = std::max(2.0 - 2.0 * ki[t], kTau);
        const double obj = -(diff * diff) / quad;
        if (obj <= best) {
          best = obj;
          j = t;
        }
      }
    }
    if (gmax + gmax2 < eps || j == n) break;

    // Copy column i: fetching column j may evict it.
    const std::vector<double> col_i = ki;
    const auto& col_j = cache.column(j);
    const double old_ai = alpha[i], old_aj = alpha[j];
    const double qij = y[i] * y[j] * col_i[j];
    if (y[i] != y[j]) {
      const double quad = std::max(2.0 + 2.0 * qij, kTau);
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      const double quad = std::max(2.0 - 2.0 * qij, kTau);
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * col_i[t] * dai + y[j] * col_j[t] * daj);
    }
  }

  // rho: average over free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

  SvmModel model;
  model.params = params;
  model.dim = data.dimension();
  model.intercept = -rho;
  model.iterations = iter;
  model.support_vectors = SparseMatrix({}, data.dimension());
  std::vector<std::size_t> sv;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) sv.push_back(t);
  }
  model.support_vectors = data.x.select_rows(sv);
  model.support_indices = sv;
  for (auto t : sv) model.dual_coefs.push_back(alpha[t] * y[t]);

  std::vector<double> dec(n);
  for (std::size_t t = 0; t < n; ++t) dec[t] = y[t] * (grad[t] + 1.0) - rho;
  std::tie(model.platt_a, model.platt_b) = fit_platt(dec, data.y);
  return model;
}

}  // namespace newscheck
