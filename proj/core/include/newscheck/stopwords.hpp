#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>

namespace newscheck {

/// Portuguese stop list. Every entry is also registered in accent-stripped
/// form, so lookups work before and after accent removal.
class StopList {
 public:
  /// The list compiled into the library from core/data/stopwords_pt.txt.
  static const StopList& bundled();
  /// Throws ConfigError if the file is missing or unreadable.
  static StopList load(const std::filesystem::path& path);
  /// One word per line; blank lines and lines starting with '#' are ignored.
  static StopList parse(std::string_view content);

  bool contains(std::string_view token) const { return words_.contains(std::string(token)); }
  std::size_t size() const { return entries_; }

 private:
  std::unordered_set<std::string> words_;
  std::size_t entries_ = 0;
};

}  // namespace newscheck
