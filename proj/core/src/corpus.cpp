#include "newscheck/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "newscheck/error.hpp"
#include "newscheck/random.hpp"
#include "newscheck/unicode.hpp"

namespace newscheck {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Fake:
      return "fake";
    case Label::True:
      return "true";
    case Label::Unknown:
      return "unknown";
  }
  return "unknown";
}

Label parse_label(std::string_view text) {
  if (text == "fake") return Label::Fake;
  if (text == "true") return Label::True;
  if (text == "unknown") return Label::Unknown;
  throw InputError("invalid label '" + std::string(text) + "'");
}

bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  auto num = [&](std::size_t pos, std::size_t len, int& out) {
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{} && p == s.data() + pos + len;
  };
  int y = 0, m = 0, d = 0;
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return false;
  if (m < 1 || m > 12 || d < 1) return false;
  static constexpr int kDays[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (d > kDays[m - 1]) return false;
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return !(m == 2 && d == 29 && !leap);
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(documents_.size());
  for (const auto& doc : documents_) {
    if (doc.id.empty()) {
      throw InputError("document with empty id");
    }
    if (!seen.insert(doc.id).second) {
      throw InputError("duplicate document id '" + doc.id + "'");
    }
    if (doc.label != Label::Unknown && doc.text.empty()) {
      throw InputError("labeled document '" + doc.id + "' has empty text");
    }
    ++counts_[doc.label];
  }
}

std::size_t Corpus::count(Label label) const {
  auto it = counts_.find(label);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::size_t> Corpus::labeled_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (documents_[i].label != Label::Unknown) out.push_back(i);
  }
  return out;
}

Corpus Corpus::subset(std::span<const std::size_t> indices) const {
  std::vector<Document> docs;
  docs.reserve(indices.size());
  for (std::size_t i : indices) docs.push_back(documents_.at(i));
  return Corpus(std::move(docs));
}

// ---------------------------------------------------------------- Fake.br

namespace {

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string host_of(std::string_view url) {
  auto pos = url.find("://");
  if (pos == std::string_view::npos) return {};
  auto rest = url.substr(pos + 3);
  rest = rest.substr(0, rest.find_first_of("/?#"));
  std::string host = unicode::to_lower(rest);
  if (host.rfind("www.", 0) == 0) host.erase(0, 4);
  return host;
}

struct FakeBrDirs {
  fs::path base;  // directory holding fake/ and true/
};

FakeBrDirs locate_fakebr(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw InputError("Fake.br root '" + root.string() + "' is not a directory");
  }
  for (const fs::path& candidate : {root / "full_texts", root}) {
    if (fs::is_directory(candidate / "fake") || fs::is_directory(candidate / "true")) {
      return {candidate};
    }
  }
  throw InputError("no documents found under '" + root.string() + "'");
}

std::string text_without_title(const std::string& raw) {
  const std::string trimmed = trim(raw);
  const auto nl = trimmed.find('\n');
  if (nl == std::string::npos) return trimmed;
  std::string body = trim(std::string_view(trimmed).substr(nl + 1));
  return body.empty() ? trimmed : body;
}

}  // namespace

FakeBrImport load_fakebr(const fs::path& root, const FakeBrOptions& options) {
  const FakeBrDirs dirs = locate_fakebr(root);
  FakeBrImport result;
  std::vector<Document> docs;

  for (Label label : {Label::Fake, Label::True}) {
    const std::string name(to_string(label));
    const fs::path text_dir = dirs.base / name;
    if (!fs::is_directory(text_dir)) continue;
    const fs::path meta_dir = dirs.base / (name + "-meta-information");

    std::vector<std::pair<long, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(text_dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
      const std::string stem = entry.path().stem().string();
      long number = 0;
      auto [p, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), number);
      if (ec != std::errc{} || p != stem.data() + stem.size()) {
        result.warnings.push_back("skipping non-numeric file " + entry.path().string());
        ++result.skipped;
        continue;
      }
      files.emplace_back(number, entry.path());
    }
    std::sort(files.begin(), files.end());

    for (const auto& [number, path] : files) {
      auto raw = read_file(path);
      if (!raw || trim(*raw).empty()) {
        result.warnings.push_back((raw ? "empty file " : "unreadable file ") + path.string());
        ++result.skipped;
        continue;
      }
      Document doc;
      doc.id = name + "-" + std::to_string(number);
      doc.label = label;
      doc.text = unicode::nfc(options.include_title ? trim(*raw) : text_without_title(*raw));

      if (auto meta = read_file(meta_dir / (std::to_string(number) + "-meta.txt"))) {
        std::istringstream lines(*meta);
        std::string author, link, category, date;
        std::getline(lines, author);
        std::getline(lines, link);
        std::getline(lines, category);
        std::getline(lines, date);
        link = trim(link);
        date = trim(date);
        if (link.find("://") != std::string::npos) {
          doc.url = link;
          if (auto host = host_of(link); !host.empty()) doc.source = host;
        }
        if (date.size() >= 10 && is_iso_date(std::string_view(date).substr(0, 10))) {
          doc.published_at = date.substr(0, 10);
        }
      }
      docs.push_back(std::move(doc));
    }
  }
  if (docs.empty()) {
    throw InputError("no documents found under '" + root.string() + "'");
  }
  result.corpus = Corpus(std::move(docs));
  return result;
}

// ---------------------------------------------------------------- JSONL

namespace {

Document parse_record(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("record is not a JSON object");
  auto required_string = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw InputError(std::string("missing or non-string field '") + key + "'");
    }
    return it->get<std::string>();
  };
  auto optional_string = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw InputError(std::string("non-string field '") + key + "'");
    return it->get<std::string>();
  };

  Document doc;
  doc.id = required_string("id");
  if (doc.id.empty()) throw InputError("empty id");
  doc.text = unicode::nfc(required_string("text"));
  doc.label = parse_label(required_string("label"));
  if (doc.label != Label::Unknown && doc.text.empty()) {
    throw InputError("labeled document has empty text");
  }
  doc.source = optional_string("source");
  doc.url = optional_string("url");
  doc.published_at = optional_string("published_at");
  if (doc.published_at && !is_iso_date(*doc.published_at)) {
    throw InputError("published_at '" + *doc.published_at + "' is not YYYY-MM-DD");
  }
  return doc;
}

}  // namespace

Corpus parse_jsonl(std::string_view content) {
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    Document doc;
    try {
      doc = parse_record(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(doc.id).second) {
      throw InputError("line " + std::to_string(line_no) + ": duplicate id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs));
}

Corpus load_jsonl(const fs::path& path) {
  auto content = read_file(path);
  if (!content) throw InputError("cannot read '" + path.string() + "'");
  return parse_jsonl(*content);
}

std::string to_jsonl_line(const Document& doc) {
  ojson j;
  j["id"] = doc.id;
  j["text"] = unicode::nfc(doc.text);
  j["label"] = std::string(to_string(doc.label));
  if (doc.source) j["source"] = *doc.source;
  if (doc.url) j["url"] = *doc.url;
  if (doc.published_at) j["published_at"] = *doc.published_at;
  return j.dump();
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents()) {
    out += to_jsonl_line(doc);
    out += '\n';
  }
  return out;
}

void save_jsonl(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << to_jsonl(corpus);
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------- folds

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_by_index.size(); ++i) {
    if (fold_by_index[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_by_index.size(); ++i) {
    if (fold_by_index[i] >= 0 && fold_by_index[i] != fold) out.push_back(i);
  }
  return out;
}

FoldAssignment stratified_kfold(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be at least 2");
  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  folds.fold_by_index.assign(corpus.size(), -1);

  Rng rng(seed);
  std::size_t offset = 0;
  for (Label label : {Label::Fake, Label::True}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (corpus[i].label == label) members.push_back(i);
    }
    if (members.size() < static_cast<std::size_t>(k)) {
      throw ValidationError("class '" + std::string(to_string(label)) + "' has " +
                            std::to_string(members.size()) + " members, fewer than k=" +
                            std::to_string(k));
    }
    rng.shuffle(std::span(members));
    for (std::size_t j = 0; j < members.size(); ++j) {
      const int fold = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
      folds.fold_by_index[members[j]] = fold;
      folds.fold_of.emplace(corpus[members[j]].id, fold);
    }
    // Continue dealing where the previous class stopped so fold totals stay level.
    offset = (offset + members.size()) % static_cast<std::size_t>(k);
  }
  return folds;
}

}  // namespace newscheck
