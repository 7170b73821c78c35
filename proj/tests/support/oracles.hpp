// Independent reference computations for the tests. Deliberately naive:
// dense loops, std::map, no shared code with the library beyond plain types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "newscheck/classifiers.hpp"
#include "newscheck/corpus.hpp"
#include "newscheck/embeddings.hpp"
#include "newscheck/metrics.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// Unigram TF-IDF: raw counts, idf = ln((1+N)/(1+df)) + 1, optional L2 normalisation.
// Columns follow the lexicographic order of the surviving terms.
struct Tfidf {
  std::vector<std::string> terms;
  std::vector<double> idf;
  Dense rows;
};

inline Tfidf tfidf(const std::vector<std::vector<std::string>>& docs, std::size_t min_df, bool l2) {
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    std::set<std::string> seen(d.begin(), d.end());
    for (const auto& t : seen) ++df[t];
  }
  Tfidf out;
  for (const auto& [t, n] : df) {
    if (n < min_df) continue;
    out.terms.push_back(t);
    out.idf.push_back(std::log((1.0 + static_cast<double>(docs.size())) / (1.0 + static_cast<double>(n))) + 1.0);
  }
  for (const auto& d : docs) {
    std::vector<double> row(out.terms.size(), 0.0);
    for (std::size_t j = 0; j < out.terms.size(); ++j) {
      const auto count = std::count(d.begin(), d.end(), out.terms[j]);
      row[j] = static_cast<double>(count) * out.idf[j];
    }
    if (l2) {
      double s = 0.0;
      for (double v : row) s += v * v;
      if (s > 0) {
        for (double& v : row) v /= std::sqrt(s);
      }
    }
    out.rows.push_back(row);
  }
  return out;
}

// Metrics straight from the definitions.
inline newscheck::Metrics metrics(const std::vector<newscheck::Label>& truth, const std::vector<newscheck::Label>& pred,
                                  newscheck::PositiveClass positive) {
  const auto pos = positive == newscheck::PositiveClass::Fake ? newscheck::Label::Fake : newscheck::Label::True;
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == pos;
    const bool p = pred[i] == pos;
    if (t && p) tp += 1;
    if (!t && p) fp += 1;
    if (t && !p) fn += 1;
    if (!t && !p) tn += 1;
  }
  newscheck::Metrics m;
  m.positive = positive;
  m.accuracy = (tp + tn) / (tp + fp + fn + tn);
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

// Exhaustive search for the best single split of one boosting round from the
// prior log-odds, with second-order gain and L2-regularised leaves.
struct StumpSplit {
  std::size_t feature = 0;
  double gain = 0.0;
  std::vector<bool> goes_left;
  double left_value = 0.0;
  double right_value = 0.0;
};

// Every admissible split whose gain is within rounding of the maximum. Equal
// partitions on different features score the same up to summation order, so the
// optimum is a set rather than a single split.
struct StumpSearch {
  bool found = false;
  double gain = 0.0;
  std::vector<StumpSplit> optima;
};

inline StumpSearch best_boosting_stump(const Dense& x, const std::vector<int>& y, double lambda, std::size_t min_data,
                                       double min_hessian) {
  const std::size_t n = x.size();
  double pos = 0;
  for (int v : y) pos += v;
  const double p0 = pos / static_cast<double>(n);
  const double base = std::log(p0 / (1 - p0));
  const double p = 1.0 / (1.0 + std::exp(-base));
  std::vector<double> g(n), h(n);
  double G = 0, H = 0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = p - y[i];
    h[i] = p * (1 - p);
    G += g[i];
    H += h[i];
  }
  const double parent = G * G / (H + lambda);
  std::vector<StumpSplit> all;
  for (std::size_t f = 0; f < x.front().size(); ++f) {
    std::set<double> values;
    for (std::size_t i = 0; i < n; ++i) values.insert(x[i][f]);
    values.insert(0.0);
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
      const double t = *it;  // left: x <= t
      double gl = 0, hl = 0;
      std::size_t cl = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i][f] <= t) {
          gl += g[i];
          hl += h[i];
          ++cl;
        }
      }
      const double gr = G - gl, hr = H - hl;
      if (cl < min_data || n - cl < min_data || hl < min_hessian || hr < min_hessian) continue;
      StumpSplit s;
      s.feature = f;
      s.gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
      s.goes_left.assign(n, false);
      for (std::size_t i = 0; i < n; ++i) s.goes_left[i] = x[i][f] <= t;
      s.left_value = -gl / (hl + lambda);
      s.right_value = -gr / (hr + lambda);
      all.push_back(std::move(s));
    }
  }
  StumpSearch out;
  for (const auto& s : all) out.gain = std::max(out.gain, s.gain);
  if (!(out.gain > 0)) return out;
  out.found = true;
  const double slack = 1e-12 * std::max(1.0, out.gain);
  for (auto& s : all) {
    if (s.gain >= out.gain - slack) out.optima.push_back(std::move(s));
  }
  return out;
}

// Mean KKT violation bound for the soft-margin dual, from the decision values.
inline double svm_kkt_residual(const std::vector<double>& alpha, const std::vector<int>& y01,
                               const std::vector<double>& decision, double C) {
  double worst = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double yi = y01[i] == 1 ? 1.0 : -1.0;
    const double m = yi * decision[i];
    double r = 0.0;
    if (alpha[i] <= 1e-12 * C) {
      r = std::max(0.0, 1.0 - m);
    } else if (alpha[i] >= C * (1 - 1e-12)) {
      r = std::max(0.0, m - 1.0);
    } else {
      r = std::abs(m - 1.0);
    }
    worst = std::max(worst, r);
  }
  return worst;
}

// Central finite differences of the negative-sampling loss; returns the worst
// relative error against the analytic gradient over all touched coordinates.
inline double ns_gradient_check(newscheck::Matrix input, newscheck::Matrix output, const newscheck::NsExample& ex,
                                double step = 1e-5) {
  const auto analytic = newscheck::negative_sampling_gradient(input, output, ex);
  double worst = 0.0;
  auto check = [&](newscheck::Matrix& m, const std::map<std::uint32_t, newscheck::DenseVector>& grads,
                   bool is_input) {
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols; ++c) {
        double& w = m.data[r * m.cols + c];
        const double saved = w;
        w = saved + step;
        const double up = is_input ? newscheck::negative_sampling_loss(m, output, ex)
                                   : newscheck::negative_sampling_loss(input, m, ex);
        w = saved - step;
        const double down = is_input ? newscheck::negative_sampling_loss(m, output, ex)
                                     : newscheck::negative_sampling_loss(input, m, ex);
        w = saved;
        const double numeric = (up - down) / (2 * step);
        auto it = grads.find(static_cast<std::uint32_t>(r));
        const double a = it == grads.end() ? 0.0 : it->second[c];
        const double scale = std::max({std::abs(a), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(a - numeric) / scale);
      }
    }
  };
  check(input, analytic.d_input, true);
  check(output, analytic.d_output, false);
  return worst;
}

}  // namespace oracle
