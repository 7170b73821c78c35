#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "newscheck/stopwords.hpp"

namespace newscheck {

/// Stem and Phrase are mutually exclusive final stages.
enum class TerminalStage { Stem, Phrase, None };

std::string_view to_string(TerminalStage stage);
TerminalStage parse_terminal_stage(std::string_view text);

struct PrepConfig {
  bool lowercase = true;
  bool strip_html_and_links = true;
  bool strip_accents = true;
  bool strip_special_chars = true;
  bool strip_punctuation = true;
  bool remove_stopwords = true;
  TerminalStage terminal_stage = TerminalStage::None;

  /// Stemming pipeline used ahead of TF-IDF.
  static PrepConfig for_tfidf();
  /// Bigram-phrasing pipeline used ahead of Word2Vec.
  static PrepConfig for_word2vec();

  bool operator==(const PrepConfig&) const = default;
};

void to_json(nlohmann::json& j, const PrepConfig& c);
void from_json(const nlohmann::json& j, PrepConfig& c);

/// Ordered tokens; never contains an empty string.
using TokenStream = std::vector<std::string>;

/// Applies the enabled character-level stages in order: html and links,
/// special characters and punctuation, accents, case. Runs of whitespace
/// collapse to one space and the result is trimmed. Idempotent.
std::string clean(std::string_view text, const PrepConfig& config);

/// Splits on Unicode whitespace. Intra-word apostrophes survive ("d'agua").
TokenStream tokenize(std::string_view text);

TokenStream remove_stopwords(const TokenStream& tokens, const StopList& stop_list = StopList::bundled());

/// Snowball Portuguese stem of every token; stream length is preserved.
TokenStream stem(const TokenStream& tokens);

/// clean -> tokenize -> stop words -> stemming (when the terminal stage is Stem).
/// Phrase-stage streams are returned unphrased; phrasing needs a fitted Phraser.
TokenStream preprocess(std::string_view text, const PrepConfig& config,
                       const StopList& stop_list = StopList::bundled());

}  // namespace newscheck
