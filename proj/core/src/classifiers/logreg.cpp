#include <algorithm>
#include <cmath>

#include "newscheck/classifiers.hpp"
#include "newscheck/error.hpp"

namespace newscheck {

double LogRegModel::decision(const SparseRow& x) const {
  double z = bias;
  for (std::size_t k = 0; k < x.nnz(); ++k) z += weights[x.indices[k]] * x.values[k];
  return z;
}

ProbPair LogRegModel::predict(const SparseRow& x) const { return ProbPair::from_fake(sigmoid(decision(x))); }

namespace {

void margins(const SparseMatrix& x, const DenseVector& w, double b, DenseVector& z) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    double s = b;
    for (std::size_t k = 0; k < r.nnz(); ++k) s += w[r.indices[k]] * r.values[k];
    z[i] = s;
  }
}

double smooth_loss(const DenseVector& z, const std::vector<int>& y, double c) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += logistic_loss(z[i], y[i]);
  return c * s;
}

double l1(const DenseVector& w) {
  double s = 0.0;
  for (double v : w) s += std::abs(v);
  return s;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

double logreg_objective(const LabeledMatrix& data, const LogRegModel& model) {
  DenseVector z(data.size());
  margins(data.x, model.weights, model.bias, z);
  return smooth_loss(z, data.y, model.params.C) + l1(model.weights);
}

// Accelerated proximal gradient (FISTA) with backtracking on the Lipschitz
// estimate and a restart whenever the objective goes up.
LogRegModel train_logreg(const LabeledMatrix& data, const LogRegParams& params) {
  data.validate();
  if (!(params.C > 0.0)) throw ValidationError("logreg C must be positive");
  if (params.max_epochs < 1) throw ValidationError("logreg max_epochs must be >= 1");
  const auto& x = data.x;
  const std::size_t n = data.size();
  const std::size_t d = data.dimension();
  const double c = params.C;

  double max_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_sq = std::max(max_sq, squared_norm(x.row(i)));
  double lip = 0.25 * c * (max_sq + 1.0);

  DenseVector w(d, 0.0), w_prev(d, 0.0), yw(d, 0.0), grad(d, 0.0), w_new(d, 0.0);
  double b = 0.0, b_prev = 0.0;
  DenseVector z(n), residual(n);
  margins(x, w, b, z);
  double objective = smooth_loss(z, data.y, c);
  double t = 1.0;

  LogRegModel model;
  model.params = params;
  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    model.epochs_run = epoch;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    for (std::size_t j = 0; j < d; ++j) yw[j] = w[j] + momentum * (w[j] - w_prev[j]);
    const double yb = b + momentum * (b - b_prev);

    margins(x, yw, yb, z);
    const double f_y = smooth_loss(z, data.y, c);
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = c * (sigmoid(z[i]) - data.y[i]);
      grad_b += r;
      const auto row = x.row(i);
      for (std::size_t k = 0; k < row.nnz(); ++k) grad[row.indices[k]] += r * row.values[k];
    }

    double b_new = 0.0, f_new = 0.0;
    for (;;) {
      double lin = 0.0, sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        w_new[j] = soft_threshold(yw[j] - grad[j] / lip, 1.0 / lip);
        const double diff = w_new[j] - yw[j];
        lin += grad[j] * diff;
        sq += diff * diff;
      }
      b_new = yb - grad_b / lip;
      lin += grad_b * (b_new - yb);
      sq += (b_new - yb) * (b_new - yb);
      margins(x, w_new, b_new, z);
      f_new = smooth_loss(z, data.y, c);
      if (f_new <= f_y + lin + 0.5 * lip * sq + 1e-12 * std::abs(f_y)) break;
      lip *= 2.0;
    }

    const double objective_new = f_new + l1(w_new);
    if (objective_new > objective && momentum > 0.0) {
      // Momentum overshot: drop it and take a plain proximal step next time.
      w_prev = w;
      b_prev = b;
      t = 1.0;
      continue;
    }
    w_prev.swap(w);
    w.swap(w_new);
    b_prev = b;
    b = b_new;
    t = t_next;
    const double decrease = objective - objective_new;
    objective = objective_new;
    if (decrease >= 0.0 && decrease < params.tol * std::max(1.0, std::abs(objective))) break;
  }
  model.weights = std::move(w);
  model.bias = b;
  for (double v : model.weights) {
    if (!std::isfinite(v)) throw ValidationError("logreg diverged to non-finite weights");
  }
  return model;
}

}  // namespace newscheck
