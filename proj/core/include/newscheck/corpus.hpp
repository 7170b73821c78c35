#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace newscheck {

enum class Label { Fake, True, Unknown };

std::string_view to_string(Label label);
/// Accepts "fake", "true", "unknown" (the JSONL spelling).
Label parse_label(std::string_view text);

struct Document {
  std::string id;
  std::string text;
  Label label = Label::Unknown;
  std::optional<std::string> source;
  std::optional<std::string> published_at;  // YYYY-MM-DD
  std::optional<std::string> url;

  bool operator==(const Document&) const = default;
};

/// Ordered, validated collection of documents. Immutable once built.
class Corpus {
 public:
  Corpus() = default;
  /// Throws InputError on empty or duplicate ids, or empty text on a labeled document.
  explicit Corpus(std::vector<Document> documents);

  std::span<const Document> documents() const { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  const std::map<Label, std::size_t>& counts() const { return counts_; }
  std::size_t count(Label label) const;

  /// Indices of documents labeled Fake or True, in corpus order.
  std::vector<std::size_t> labeled_indices() const;
  Corpus subset(std::span<const std::size_t> indices) const;

  bool operator==(const Corpus& other) const { return documents_ == other.documents_; }

 private:
  std::vector<Document> documents_;
  std::map<Label, std::size_t> counts_;
};

struct FakeBrOptions {
  /// Fake.br texts carry the headline on their first line. Body-only drops it.
  bool include_title = false;
};

struct FakeBrImport {
  Corpus corpus;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// Imports the public Fake.br layout. `root` may be the repository root
/// (containing full_texts/), or any directory holding fake/ and true/ subdirectories
/// of numbered .txt files. Sibling *-meta-information/ directories, when present,
/// supply url and publication date.
FakeBrImport load_fakebr(const std::filesystem::path& root, const FakeBrOptions& options = {});

Corpus load_jsonl(const std::filesystem::path& path);
Corpus parse_jsonl(std::string_view content);
void save_jsonl(const Corpus& corpus, const std::filesystem::path& path);
std::string to_jsonl(const Corpus& corpus);
std::string to_jsonl_line(const Document& doc);

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  std::unordered_map<std::string, int> fold_of;
  /// Fold per corpus index; -1 for Unknown-labeled documents.
  std::vector<int> fold_by_index;

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

/// Shuffles each class's members with a seeded generator, then deals them
/// round-robin across folds. Unknown-labeled documents are left out.
FoldAssignment stratified_kfold(const Corpus& corpus, int k, std::uint64_t seed);

/// Accepts exactly YYYY-MM-DD with a valid month and day.
bool is_iso_date(std::string_view text);

}  // namespace newscheck
