#include <fstream>

#include "newscheck/ingest.hpp"

namespace newscheck {

namespace fs = std::filesystem;

NewsBank NewsBank::open(const fs::path& path) {
  NewsBank bank;
  bank.path_ = path;
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream create(path, std::ios::binary | std::ios::app);
    if (!create) throw InputError("cannot create news bank '" + path.string() + "'");
    return bank;
  }
  const Corpus existing = load_jsonl(path);
  for (const auto& doc : existing.documents()) {
    if (!doc.url || !doc.source) {
      throw InputError("news bank record '" + doc.id + "' lacks url or source");
    }
    if (!bank.digests_.insert(url_digest(*doc.url)).second) {
      throw InputError("news bank holds two records for URL '" + *doc.url + "'");
    }
  }
  return bank;
}

bool NewsBank::contains_url(std::string_view url) const {
  const std::string digest = url_digest(url);
  std::lock_guard lock(*mutex_);
  return digests_.count(digest) > 0;
}

bool NewsBank::append(const Document& doc) {
  if (!doc.url || !doc.source || doc.source->empty()) {
    throw ValidationError("news bank records need a url and a source");
  }
  if (doc.label != Label::Unknown) throw ValidationError("news bank records are unlabeled");
  const std::string digest = url_digest(*doc.url);
  const std::string line = to_jsonl_line(doc) + "\n";
  std::lock_guard lock(*mutex_);
  if (digests_.count(digest)) return false;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << line;
  out.flush();
  if (!out) throw InputError("cannot append to news bank '" + path_.string() + "'");
  digests_.insert(digest);
  return true;
}

std::size_t NewsBank::size() const {
  std::lock_guard lock(*mutex_);
  return digests_.size();
}

Corpus NewsBank::load() const {
  std::lock_guard lock(*mutex_);
  return load_jsonl(path_);
}

}  // namespace newscheck
