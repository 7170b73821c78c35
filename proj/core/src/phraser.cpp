#include "newscheck/embeddings.hpp"

#include <unordered_map>

namespace newscheck {

bool Phraser::mergeable(const std::string& a, const std::string& b) const {
  auto it = pair_score.find({a, b});
  return it != pair_score.end() && it->second > threshold;
}

Phraser fit_phraser(std::span<const TokenStream> streams, std::size_t min_count, double threshold) {
  std::unordered_map<std::string, std::size_t> unigram;
  std::map<std::pair<std::string, std::string>, std::size_t> bigram;
  std::size_t n_tokens = 0;
  for (const auto& tokens : streams) {
    n_tokens += tokens.size();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      ++unigram[tokens[i]];
      if (i + 1 < tokens.size()) ++bigram[{tokens[i], tokens[i + 1]}];
    }
  }

  Phraser p;
  p.threshold = threshold;
  p.min_count = min_count;
  for (const auto& [pair, count] : bigram) {
    if (count < min_count) continue;
    const double ca = static_cast<double>(unigram[pair.first]);
    const double cb = static_cast<double>(unigram[pair.second]);
    const double score = (static_cast<double>(count) - static_cast<double>(min_count)) *
                         static_cast<double>(n_tokens) / (ca * cb);
    p.pair_score.emplace(pair, score);
  }
  return p;
}

TokenStream apply_phraser(const Phraser& phraser, const TokenStream& tokens) {
  TokenStream out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (i + 1 < tokens.size() && phraser.mergeable(tokens[i], tokens[i + 1])) {
      out.push_back(tokens[i] + phraser.delimiter + tokens[i + 1]);
      i += 2;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace newscheck
