#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace newscheck::html {

/// Decodes character references (named, decimal, hex) to UTF-8.
std::string decode_entities(std::string_view text);

struct Node {
  bool is_text = false;
  std::string tag;  // lowercase; empty for text and the document root
  std::vector<std::pair<std::string, std::string>> attributes;  // names lowercase, values decoded
  std::string text;  // text nodes only, entities decoded
  int parent = -1;
  std::vector<int> children;

  const std::string* attribute(std::string_view name) const;
  bool has_class(std::string_view cls) const;
};

/// Forgiving HTML parser: unknown end tags are ignored, unclosed elements are
/// closed at end of input, script/style content is kept raw.
class Document {
 public:
  explicit Document(std::string_view html);

  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }
  int root() const { return 0; }

  /// Elements matching a CSS selector, in document order. Supported: type, *, #id,
  /// .class, [attr], [attr=v], [attr~=v], [attr^=v], [attr$=v], [attr*=v],
  /// descendant and child (>) combinators, comma-separated groups.
  /// Throws ValidationError on a malformed selector.
  std::vector<int> select(std::string_view selector) const;
  std::optional<int> select_first(std::string_view selector) const;

  /// Visible text below `id` with whitespace runs collapsed to one space and trimmed.
  std::string text(int id) const;

 private:
  std::vector<Node> nodes_;
};

}  // namespace newscheck::html
