#include "newscheck/stopwords.hpp"

#include <fstream>
#include <sstream>

#include "newscheck/error.hpp"
#include "newscheck/unicode.hpp"

namespace newscheck {

namespace detail {
extern const std::string_view kBundledPortugueseStopwords;
}

StopList StopList::parse(std::string_view content) {
  StopList list;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    const std::string word = unicode::to_lower(unicode::nfc(line.substr(first, last - first + 1)));
    ++list.entries_;
    list.words_.insert(word);
    list.words_.insert(unicode::strip_accents(word));
  }
  return list;
}

StopList StopList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("stop-list resource '" + path.string() + "' not found");
  std::ostringstream ss;
  ss << in.rdbuf();
  StopList list = parse(ss.str());
  if (list.size() == 0) throw ConfigError("stop-list resource '" + path.string() + "' is empty");
  return list;
}

const StopList& StopList::bundled() {
  static const StopList list = parse(detail::kBundledPortugueseStopwords);
  return list;
}

}  // namespace newscheck
