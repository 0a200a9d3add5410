#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curio::html {

enum class NodeKind { Document, Element, Text };

/// A node of the parsed tree. Elements own their children; `parent` is a
/// non-owning back pointer. Tag and attribute names are lower-cased.
struct Node {
  NodeKind kind = NodeKind::Element;
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // Text nodes only; entity-decoded.
  Node* parent = nullptr;
  std::vector<std::unique_ptr<Node>> children;

  bool is_element() const { return kind == NodeKind::Element; }
  std::optional<std::string_view> attr(std::string_view name) const;
  bool has_class(std::string_view cls) const;

  /// Element siblings only.
  const Node* previous_element() const;
  const Node* next_element() const;
};

/// Tolerant HTML parser. Never rejects input: unknown or unbalanced markup
/// is repaired the way browsers broadly do (implied end tags for p/li/td/tr
/// and friends, stray end tags ignored, unclosed elements closed at EOF).
/// Comments and doctypes are dropped; script/style/textarea/title bodies
/// are raw text.
class Document {
 public:
  static Document parse(std::string_view source);

  const Node& root() const { return *root_; }

 private:
  std::unique_ptr<Node> root_;
};

/// Concatenated descendant text (script/style bodies excluded), with
/// whitespace runs collapsed to a single space and the ends trimmed.
std::string text_content(const Node& node);

/// Collapses runs of ASCII whitespace and U+00A0 to one space and trims.
std::string collapse_whitespace(std::string_view text);

/// Decodes character references (&amp; &#39; &#x2014; ...). Unknown named
/// references are left verbatim.
std::string decode_entities(std::string_view text);

}  // namespace curio::html
