#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "newscheck/sparse.hpp"
#include "newscheck/textprep.hpp"

namespace newscheck {

struct NgramRange {
  int lo = 1;
  int hi = 1;

  bool operator==(const NgramRange&) const = default;
};

/// "1" -> (1,1), "22" -> (2,2), "1,2" / "1-2" / "(1, 2)" -> (1,2). Throws ConfigError.
NgramRange parse_ngram_range(std::string_view text);
std::string to_string(const NgramRange& range);

/// N-grams of every order in `range`, tokens joined by a single space.
std::vector<std::string> ngrams(const TokenStream& tokens, NgramRange range);

/// Terms sorted lexicographically; index i is terms[i].
struct Vocabulary {
  std::vector<std::string> terms;
  std::vector<std::size_t> document_frequency;
  std::unordered_map<std::string, std::uint32_t> term_to_index;
  std::size_t n_documents = 0;
  NgramRange ngram_range;
  std::size_t min_df = 1;

  std::size_t size() const { return terms.size(); }
  /// Index of `term`, or -1.
  long find(const std::string& term) const;
  void rebuild_index();
};

struct TfidfOptions {
  NgramRange ngram_range;
  std::size_t min_df = 2;
  bool l2_normalize = true;
};

void to_json(nlohmann::json& j, const TfidfOptions& o);
void from_json(const nlohmann::json& j, TfidfOptions& o);

/// Raw-count TF times smoothed IDF: idf(t) = ln((1 + N) / (1 + df(t))) + 1.
struct TfidfModel {
  Vocabulary vocabulary;
  std::vector<double> idf;
  bool l2_normalize = true;

  std::size_t dimension() const { return vocabulary.size(); }
};

/// Throws ValidationError on an empty stream list or when min_df leaves no terms.
TfidfModel fit_tfidf(std::span<const TokenStream> streams, const TfidfOptions& options);

/// Out-of-vocabulary n-grams are ignored; an all-OOV stream maps to the zero vector.
SparseVector transform(const TfidfModel& model, const TokenStream& tokens);
SparseMatrix transform(const TfidfModel& model, std::span<const TokenStream> streams);

}  // namespace newscheck
