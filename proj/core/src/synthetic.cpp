#include "newscheck/synthetic.hpp"

#include <array>
#include <cstdio>

#include "newscheck/error.hpp"

namespace newscheck {

namespace {

constexpr std::array<std::string_view, 10> kSyllables{"ba", "de", "fi", "lo", "mu", "ra", "se", "ti", "vo", "za"};

}  // namespace

std::string synthetic_word(SyntheticPool pool, std::size_t i) {
  // The prefix keeps pools disjoint; the trailing 'k' is no Portuguese suffix,
  // so the stemmer leaves the word alone.
  std::string w = pool == SyntheticPool::Fake ? "fx" : pool == SyntheticPool::True ? "tv" : "sh";
  std::string digits;
  do {
    digits.insert(0, kSyllables[i % kSyllables.size()]);
    i /= kSyllables.size();
  } while (i > 0);
  return w + digits + "k";
}

std::string synthetic_text(Label lean, const SyntheticOptions& o, Rng& rng) {
  std::string text;
  for (std::size_t t = 0; t < o.tokens_per_doc; ++t) {
    std::string word;
    if (lean != Label::Unknown && rng.uniform() < o.signal) {
      const auto pool = lean == Label::Fake ? SyntheticPool::Fake : SyntheticPool::True;
      word = synthetic_word(pool, static_cast<std::size_t>(rng.below(o.class_vocab)));
    } else {
      word = synthetic_word(SyntheticPool::Shared, static_cast<std::size_t>(rng.below(o.shared_vocab)));
    }
    if (!text.empty()) text += ' ';
    text += word;
  }
  return text;
}

Corpus make_synthetic_corpus(const SyntheticOptions& o) {
  if (o.n_docs < 2 || o.tokens_per_doc == 0 || o.class_vocab == 0 || o.shared_vocab == 0 ||
      !(o.signal > 0 && o.signal <= 1)) {
    throw ValidationError("invalid synthetic corpus options");
  }
  Rng rng(o.seed);
  std::vector<Document> docs;
  docs.reserve(o.n_docs);
  for (std::size_t i = 0; i < o.n_docs; ++i) {
    Document d;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%04zu", i);
    d.id = id;
    d.label = i % 2 == 0 ? Label::Fake : Label::True;
    d.text = synthetic_text(d.label, o, rng);
    d.source = "synthetic";
    docs.push_back(std::move(d));
  }
  return Corpus(std::move(docs));
}

}  // namespace newscheck
