#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "newscheck/embeddings.hpp"
#include "newscheck/error.hpp"
#include "newscheck/random.hpp"

namespace newscheck {

std::string_view to_string(W2vMode mode) { return mode == W2vMode::CBOW ? "cbow" : "skipgram"; }

W2vMode parse_w2v_mode(std::string_view text) {
  if (text == "cbow") return W2vMode::CBOW;
  if (text == "skipgram" || text == "skip-gram") return W2vMode::SkipGram;
  throw ConfigError("unknown word2vec mode '" + std::string(text) + "'");
}

void W2vConfig::validate() const {
  if (dim < 1) throw ValidationError("word2vec dim must be >= 1");
  if (window < 1) throw ValidationError("word2vec window must be >= 1");
  if (min_count < 1) throw ValidationError("word2vec min_count must be >= 1");
  if (!(alpha_min > 0.0 && alpha_min <= alpha0)) {
    throw ValidationError("word2vec learning rates must satisfy 0 < alpha_min <= alpha0");
  }
  if (negatives < 1) throw ValidationError("word2vec negatives must be >= 1");
  if (epochs < 1) throw ValidationError("word2vec epochs must be >= 1");
  if (threads < 1) throw ValidationError("word2vec threads must be >= 1");
}

void to_json(nlohmann::json& j, const W2vConfig& c) {
  j = nlohmann::json{{"mode", std::string(to_string(c.mode))},
                     {"dim", c.dim},
                     {"window", c.window},
                     {"min_count", c.min_count},
                     {"alpha", c.alpha0},
                     {"min_alpha", c.alpha_min},
                     {"negatives", c.negatives},
                     {"epochs", c.epochs},
                     {"seed", c.seed},
                     {"threads", c.threads}};
}

void from_json(const nlohmann::json& j, W2vConfig& c) {
  if (j.contains("mode")) c.mode = parse_w2v_mode(j.at("mode").get<std::string>());
  c.dim = j.value("dim", c.dim);
  c.window = j.value("window", c.window);
  c.min_count = j.value("min_count", c.min_count);
  c.alpha0 = j.value("alpha", c.alpha0);
  c.alpha_min = j.value("min_alpha", c.alpha_min);
  c.negatives = j.value("negatives", c.negatives);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
}

long EmbeddingModel::find(const std::string& term) const {
  auto it = index.find(term);
  return it == index.end() ? -1 : static_cast<long>(it->second);
}

void EmbeddingModel::rebuild_index() {
  index.clear();
  for (std::size_t i = 0; i < terms.size(); ++i) index.emplace(terms[i], static_cast<std::uint32_t>(i));
}

double EmbeddingModel::similarity(const std::string& a, const std::string& b) const {
  const long ia = find(a);
  const long ib = find(b);
  if (ia < 0 || ib < 0) throw ValidationError("similarity: term not in vocabulary");
  const auto va = vector(static_cast<std::size_t>(ia));
  const auto vb = vector(static_cast<std::size_t>(ib));
  double d = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < va.size(); ++k) {
    d += va[k] * vb[k];
    na += va[k] * va[k];
    nb += vb[k] * vb[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  if (ia == ib) return 1.0;
  return d / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

// Plain access for deterministic training; relaxed atomics for lock-free parallel training.
template <bool Concurrent>
struct Cell {
  static double load(const double& x) {
    if constexpr (Concurrent) {
      return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
    } else {
      return x;
    }
  }
  static void store(double& x, double v) {
    if constexpr (Concurrent) {
      std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
    } else {
      x = v;
    }
  }
};

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// One logistic term of the objective. Adds dL/dh into grad_h, writes dL/dv into
// d_out when given, and applies v -= lr * dL/dv when lr > 0.
template <bool Concurrent>
double ns_term(std::span<const double> h, std::span<double> out_row, bool positive, double lr,
               std::span<double> grad_h, double* d_out) {
  using C = Cell<Concurrent>;
  const std::size_t dim = h.size();
  double f = 0.0;
  for (std::size_t k = 0; k < dim; ++k) f += C::load(out_row[k]) * h[k];
  const double loss = positive ? softplus(-f) : softplus(f);
  const double g = sigmoid(f) - (positive ? 1.0 : 0.0);
  for (std::size_t k = 0; k < dim; ++k) grad_h[k] += g * C::load(out_row[k]);
  if (d_out != nullptr) {
    for (std::size_t k = 0; k < dim; ++k) d_out[k] += g * h[k];
  }
  if (lr > 0.0) {
    for (std::size_t k = 0; k < dim; ++k) C::store(out_row[k], C::load(out_row[k]) - lr * g * h[k]);
  }
  return loss;
}

template <bool Concurrent>
void mean_input(const Matrix& input, std::span<const std::uint32_t> inputs, std::span<double> h) {
  using C = Cell<Concurrent>;
  std::fill(h.begin(), h.end(), 0.0);
  for (auto i : inputs) {
    const auto r = input.row(i);
    for (std::size_t k = 0; k < h.size(); ++k) h[k] += C::load(r[k]);
  }
  const double inv = 1.0 / static_cast<double>(inputs.size());
  for (double& x : h) x *= inv;
}

struct Scratch {
  DenseVector h;
  DenseVector grad_h;
  explicit Scratch(std::size_t dim) : h(dim), grad_h(dim) {}
};

template <bool Concurrent>
double sgd_step(Matrix& input, Matrix& output, std::span<const std::uint32_t> inputs, std::uint32_t target,
                std::span<const std::uint32_t> negatives, double lr, Scratch& s) {
  using C = Cell<Concurrent>;
  mean_input<Concurrent>(input, inputs, s.h);
  std::fill(s.grad_h.begin(), s.grad_h.end(), 0.0);
  double loss = ns_term<Concurrent>(s.h, output.row(target), true, lr, s.grad_h, nullptr);
  for (auto n : negatives) loss += ns_term<Concurrent>(s.h, output.row(n), false, lr, s.grad_h, nullptr);
  const double scale = lr / static_cast<double>(inputs.size());
  for (auto i : inputs) {
    auto r = input.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) C::store(r[k], C::load(r[k]) - scale * s.grad_h[k]);
  }
  return loss;
}

void check_example(const Matrix& input, const Matrix& output, const NsExample& ex) {
  if (ex.inputs.empty()) throw ValidationError("negative-sampling example needs at least one input");
  auto in_range = [](std::uint32_t i, const Matrix& m) { return i < m.rows; };
  for (auto i : ex.inputs) {
    if (!in_range(i, input)) throw ValidationError("input index out of range");
  }
  if (!in_range(ex.target, output)) throw ValidationError("target index out of range");
  for (auto n : ex.negatives) {
    if (!in_range(n, output)) throw ValidationError("negative index out of range");
  }
  if (input.cols != output.cols) throw ValidationError("input/output dimension mismatch");
}

class NoiseSampler {
 public:
  explicit NoiseSampler(std::span<const std::uint64_t> freq) : cumulative_(freq.size()) {
    double total = 0.0;
    for (std::size_t i = 0; i < freq.size(); ++i) {
      total += std::pow(static_cast<double>(freq[i]), 0.75);
      cumulative_[i] = total;
    }
  }
  std::uint32_t sample(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

struct TrainState {
  EmbeddingModel& model;
  const std::vector<std::vector<std::uint32_t>>& sequences;
  const NoiseSampler& sampler;
  std::uint64_t total_updates;
};

struct EpochTally {
  double loss = 0.0;
  std::uint64_t examples = 0;
};

template <bool Concurrent>
EpochTally train_sequences(TrainState& st, std::size_t begin, std::size_t stride, Rng& rng,
                           std::atomic<std::uint64_t>& progress) {
  auto& model = st.model;
  const auto& cfg = model.config;
  Scratch scratch(model.dim());
  std::vector<std::uint32_t> context;
  std::vector<std::uint32_t> negatives;
  EpochTally tally;

  auto draw_negatives = [&](std::uint32_t target) {
    negatives.clear();
    for (int n = 0; n < cfg.negatives; ++n) {
      const auto w = st.sampler.sample(rng);
      if (w != target) negatives.push_back(w);
    }
  };

  for (std::size_t s = begin; s < st.sequences.size(); s += stride) {
    const auto& seq = st.sequences[s];
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::uint64_t done = progress.fetch_add(1, std::memory_order_relaxed);
      const double frac = static_cast<double>(done) / static_cast<double>(st.total_updates);
      const double lr = std::max(cfg.alpha_min, cfg.alpha0 - (cfg.alpha0 - cfg.alpha_min) * frac);

      const std::size_t w = static_cast<std::size_t>(cfg.window);
      const std::size_t lo = i >= w ? i - w : 0;
      const std::size_t hi = std::min(seq.size() - 1, i + w);
      context.clear();
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i) context.push_back(seq[j]);
      }
      if (context.empty()) continue;

      if (cfg.mode == W2vMode::CBOW) {
        draw_negatives(seq[i]);
        tally.loss += sgd_step<Concurrent>(model.input_vectors, model.output_vectors, context, seq[i],
                                           negatives, lr, scratch);
        ++tally.examples;
      } else {
        const std::uint32_t center = seq[i];
        for (auto ctx : context) {
          draw_negatives(ctx);
          tally.loss += sgd_step<Concurrent>(model.input_vectors, model.output_vectors,
                                             std::span(&center, 1), ctx, negatives, lr, scratch);
          ++tally.examples;
        }
      }
    }
  }
  return tally;
}

}  // namespace

double negative_sampling_loss(const Matrix& input, const Matrix& output, const NsExample& ex) {
  return negative_sampling_gradient(input, output, ex).loss;
}

NsGradient negative_sampling_gradient(const Matrix& input, const Matrix& output, const NsExample& ex) {
  check_example(input, output, ex);
  const std::size_t dim = input.cols;
  DenseVector h(dim);
  mean_input<false>(input, ex.inputs, h);
  DenseVector grad_h(dim, 0.0);
  // ns_term only mutates the row when lr > 0; a copy keeps the API const.
  Matrix out_copy = output;
  NsGradient g;
  auto term = [&](std::uint32_t word, bool positive) {
    auto& d = g.d_output.try_emplace(word, DenseVector(dim, 0.0)).first->second;
    g.loss += ns_term<false>(h, out_copy.row(word), positive, 0.0, grad_h, d.data());
  };
  term(ex.target, true);
  for (auto n : ex.negatives) term(n, false);
  const double inv = 1.0 / static_cast<double>(ex.inputs.size());
  for (auto i : ex.inputs) {
    auto& d = g.d_input.try_emplace(i, DenseVector(dim, 0.0)).first->second;
    for (std::size_t k = 0; k < dim; ++k) d[k] += inv * grad_h[k];
  }
  return g;
}

EmbeddingModel train_word2vec(std::span<const TokenStream> streams, const W2vConfig& config) {
  config.validate();

  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& tokens : streams) {
    for (const auto& t : tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [term, c] : counts) {
    if (c >= static_cast<std::uint64_t>(config.min_count)) kept.emplace_back(term, c);
  }
  if (kept.empty()) throw ValidationError("word2vec vocabulary is empty after min_count filtering");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  EmbeddingModel model;
  model.config = config;
  for (auto& [term, c] : kept) {
    model.terms.push_back(term);
    model.frequency.push_back(c);
  }
  model.rebuild_index();

  const std::size_t v = model.size();
  const auto dim = static_cast<std::size_t>(config.dim);
  model.input_vectors = Matrix(v, dim);
  model.output_vectors = Matrix(v, dim);
  Rng init_rng(config.seed);
  for (double& x : model.input_vectors.data) x = (init_rng.uniform() - 0.5) / static_cast<double>(dim);

  std::vector<std::vector<std::uint32_t>> sequences;
  sequences.reserve(streams.size());
  std::uint64_t words = 0;
  for (const auto& tokens : streams) {
    std::vector<std::uint32_t> seq;
    for (const auto& t : tokens) {
      auto it = model.index.find(t);
      if (it != model.index.end()) seq.push_back(it->second);
    }
    words += seq.size();
    sequences.push_back(std::move(seq));
  }

  const NoiseSampler sampler(model.frequency);
  TrainState state{model, sequences, sampler,
                   std::max<std::uint64_t>(1, words * static_cast<std::uint64_t>(config.epochs))};
  std::atomic<std::uint64_t> progress{0};

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    EpochTally total;
    if (config.threads == 1) {
      Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch)));
      total = train_sequences<false>(state, 0, 1, rng, progress);
    } else {
      const auto n = static_cast<std::size_t>(config.threads);
      std::vector<EpochTally> tallies(n);
      std::vector<std::thread> workers;
      for (std::size_t t = 0; t < n; ++t) {
        workers.emplace_back([&, t] {
          Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch) * n + t));
          tallies[t] = train_sequences<true>(state, t, n, rng, progress);
        });
      }
      for (auto& w : workers) w.join();
      for (const auto& t : tallies) {
        total.loss += t.loss;
        total.examples += t.examples;
      }
    }
    model.epoch_loss.push_back(total.examples ? total.loss / static_cast<double>(total.examples) : 0.0);
  }
  return model;
}

DenseVector doc_vector(const EmbeddingModel& model, const TokenStream& tokens) {
  DenseVector out(model.dim(), 0.0);
  std::size_t n = 0;
  for (const auto& t : tokens) {
    auto it = model.index.find(t);
    if (it == model.index.end()) continue;
    const auto r = model.vector(it->second);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += r[k];
    ++n;
  }
  if (n > 0) {
    const double inv = 1.0 / static_cast<double>(n);
    for (double& x : out) x *= inv;
  }
  return out;
}

}  // namespace newscheck
