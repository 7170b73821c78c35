#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "newscheck/corpus.hpp"
#include "newscheck/random.hpp"

namespace newscheck {

/// Two-vocabulary corpus: every token is drawn from a shared pool, except a
/// `signal` fraction drawn from the vocabulary of the document's own class.
/// Words are ASCII and survive cleaning, stop-word removal and stemming intact.
struct SyntheticOptions {
  std::size_t n_docs = 400;
  std::size_t tokens_per_doc = 60;
  std::size_t class_vocab = 40;
  std::size_t shared_vocab = 200;
  double signal = 0.25;
  std::uint64_t seed = 1;
};

enum class SyntheticPool { Fake, True, Shared };

/// Deterministic word `i` of a pool.
std::string synthetic_word(SyntheticPool pool, std::size_t i);

/// One document leaning towards `lean` (Fake or True); Unknown draws shared words only.
std::string synthetic_text(Label lean, const SyntheticOptions& options, Rng& rng);

/// Balanced corpus, classes interleaved, ids "syn-0000", "syn-0001", ...
Corpus make_synthetic_corpus(const SyntheticOptions& options = {});

}  // namespace newscheck
