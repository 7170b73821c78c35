#include "newscheck/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "newscheck/error.hpp"

namespace newscheck {

NgramRange parse_ngram_range(std::string_view text) {
  // "1", "12" (grid shorthand), "1,2", "1-2", "(1, 2)"
  std::string t;
  for (char c : text) {
    if (c != '(' && c != ')' && c != ' ') t.push_back(c);
  }
  auto digit = [&](char c) {
    if (c < '1' || c > '9') throw ConfigError("invalid ngram_range '" + std::string(text) + "'");
    return c - '0';
  };
  NgramRange r;
  if (t.size() == 1) {
    r.lo = r.hi = digit(t[0]);
  } else if (t.size() == 2) {
    r.lo = digit(t[0]);
    r.hi = digit(t[1]);
  } else if (t.size() == 3 && (t[1] == ',' || t[1] == '-')) {
    r.lo = digit(t[0]);
    r.hi = digit(t[2]);
  } else {
    throw ConfigError("invalid ngram_range '" + std::string(text) + "'");
  }
  if (r.lo > r.hi) throw ConfigError("ngram_range lower bound exceeds upper bound");
  return r;
}

std::string to_string(const NgramRange& range) {
  return "(" + std::to_string(range.lo) + "," + std::to_string(range.hi) + ")";
}

std::vector<std::string> ngrams(const TokenStream& tokens, NgramRange range) {
  std::vector<std::string> out;
  for (int n = range.lo; n <= range.hi; ++n) {
    const auto len = static_cast<std::size_t>(n);
    if (tokens.size() < len) break;
    for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
      std::string g = tokens[i];
      for (std::size_t k = 1; k < len; ++k) {
        g += ' ';
        g += tokens[i + k];
      }
      out.push_back(std::move(g));
    }
  }
  return out;
}

long Vocabulary::find(const std::string& term) const {
  auto it = term_to_index.find(term);
  return it == term_to_index.end() ? -1 : static_cast<long>(it->second);
}

void Vocabulary::rebuild_index() {
  term_to_index.clear();
  term_to_index.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    term_to_index.emplace(terms[i], static_cast<std::uint32_t>(i));
  }
}

void to_json(nlohmann::json& j, const TfidfOptions& o) {
  j = nlohmann::json{{"ngram_range", {o.ngram_range.lo, o.ngram_range.hi}},
                     {"min_df", o.min_df},
                     {"l2_normalize", o.l2_normalize}};
}

void from_json(const nlohmann::json& j, TfidfOptions& o) {
  if (j.contains("ngram_range")) {
    const auto& r = j.at("ngram_range");
    if (r.is_array() && r.size() == 2) {
      o.ngram_range = {r[0].get<int>(), r[1].get<int>()};
    } else {
      o.ngram_range = parse_ngram_range(r.is_string() ? r.get<std::string>() : r.dump());
    }
  }
  o.min_df = j.value("min_df", o.min_df);
  o.l2_normalize = j.value("l2_normalize", o.l2_normalize);
}

TfidfModel fit_tfidf(std::span<const TokenStream> streams, const TfidfOptions& options) {
  if (streams.empty()) throw ValidationError("cannot fit TF-IDF on an empty stream list");
  if (options.ngram_range.lo < 1 || options.ngram_range.lo > options.ngram_range.hi) {
    throw ValidationError("invalid ngram_range " + to_string(options.ngram_range));
  }

  std::unordered_map<std::string, std::size_t> df;
  for (const auto& tokens : streams) {
    auto grams = ngrams(tokens, options.ngram_range);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[std::move(g)];
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, count] : df) {
    if (count >= options.min_df) kept.emplace_back(term, count);
  }
  if (kept.empty()) throw ValidationError("vocabulary is empty after min_df filtering");
  std::sort(kept.begin(), kept.end());

  TfidfModel model;
  model.l2_normalize = options.l2_normalize;
  auto& vocab = model.vocabulary;
  vocab.n_documents = streams.size();
  vocab.ngram_range = options.ngram_range;
  vocab.min_df = options.min_df;
  vocab.terms.reserve(kept.size());
  vocab.document_frequency.reserve(kept.size());
  model.idf.reserve(kept.size());
  const double n = static_cast<double>(streams.size());
  for (auto& [term, count] : kept) {
    vocab.terms.push_back(std::move(term));
    vocab.document_frequency.push_back(count);
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  vocab.rebuild_index();
  return model;
}

SparseVector transform(const TfidfModel& model, const TokenStream& tokens) {
  std::map<std::uint32_t, double> counts;
  for (const auto& g : ngrams(tokens, model.vocabulary.ngram_range)) {
    const long idx = model.vocabulary.find(g);
    if (idx >= 0) counts[static_cast<std::uint32_t>(idx)] += 1.0;
  }
  SparseVector v;
  v.indices.reserve(counts.size());
  v.values.reserve(counts.size());
  for (const auto& [idx, count] : counts) {
    v.indices.push_back(idx);
    v.values.push_back(count * model.idf[idx]);
  }
  if (model.l2_normalize && !v.empty()) {
    const double norm = v.norm();
    for (double& x : v.values) x /= norm;
  }
  return v;
}

SparseMatrix transform(const TfidfModel& model, std::span<const TokenStream> streams) {
  SparseMatrix m({}, model.dimension());
  for (const auto& tokens : streams) m.append(transform(model, tokens));
  return m;
}

}  // namespace newscheck
