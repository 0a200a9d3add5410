#include "curio/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <initializer_list>

namespace curio::html {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool one_of(std::string_view name, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

bool is_void(std::string_view tag) {
  return one_of(tag, {"area", "base", "br", "col", "embed", "hr", "img", "input", "link",
                      "meta", "param", "source", "track", "wbr", "keygen"});
}

bool is_raw_text(std::string_view tag) {
  return one_of(tag, {"script", "style", "textarea", "title", "xmp", "noembed", "iframe"});
}

bool closes_paragraph(std::string_view tag) {
  return one_of(tag, {"address", "article", "aside", "blockquote", "details", "div", "dl",
                      "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
                      "h4", "h5", "h6", "header", "hr", "main", "menu", "nav", "ol", "p",
                      "pre", "section", "table", "ul", "li", "dd", "dt"});
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

struct NamedEntity {
  std::string_view name;
  std::uint32_t code_point;
};

constexpr std::array<NamedEntity, 32> kEntities{{
    {"amp", '&'},     {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
    {"apos", '\''},   {"nbsp", 0xA0},    {"copy", 0xA9},    {"reg", 0xAE},
    {"laquo", 0xAB},  {"raquo", 0xBB},   {"ndash", 0x2013}, {"mdash", 0x2014},
    {"hellip", 0x2026}, {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C},
    {"rdquo", 0x201D}, {"middot", 0xB7}, {"deg", 0xB0},     {"times", 0xD7},
    {"bull", 0x2022}, {"trade", 0x2122}, {"euro", 0x20AC},  {"pound", 0xA3},
    {"sect", 0xA7},   {"para", 0xB6},    {"frac12", 0xBD},  {"shy", 0xAD},
    {"eacute", 0xE9}, {"egrave", 0xE8},  {"ccedil", 0xE7},  {"atilde", 0xE3},
}};

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string_view src) : src_(src) {
    root_ = std::make_unique<Node>();
    root_->kind = NodeKind::Document;
    stack_.push_back(root_.get());
  }

  std::unique_ptr<Node> run() {
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<' && try_markup()) continue;
      read_text();
    }
    return std::move(root_);
  }

 private:
  Node* current() { return stack_.back(); }

  bool try_markup() {
    std::string_view rest = src_.substr(pos_);
    if (rest.starts_with("<!--")) {
      auto end = src_.find("-->", pos_ + 4);
      pos_ = end == std::string_view::npos ? src_.size() : end + 3;
      return true;
    }
    if (rest.size() >= 2 && (rest[1] == '!' || rest[1] == '?')) {
      auto end = src_.find('>', pos_);
      pos_ = end == std::string_view::npos ? src_.size() : end + 1;
      return true;
    }
    if (rest.size() >= 3 && rest[1] == '/' && std::isalpha(static_cast<unsigned char>(rest[2]))) {
      read_end_tag();
      return true;
    }
    if (rest.size() >= 2 && std::isalpha(static_cast<unsigned char>(rest[1]))) {
      read_start_tag();
      return true;
    }
    return false;
  }

  void read_text() {
    std::size_t start = pos_;
    ++pos_;  // a stray '<' is text
    while (pos_ < src_.size() && src_[pos_] != '<') ++pos_;
    add_text(decode_entities(src_.substr(start, pos_ - start)));
  }

  void add_text(std::string text) {
    if (text.empty()) return;
    Node* parent = current();
    if (!parent->children.empty() && parent->children.back()->kind == NodeKind::Text) {
      parent->children.back()->text += text;
      return;
    }
    auto node = std::make_unique<Node>();
    node->kind = NodeKind::Text;
    node->text = std::move(text);
    node->parent = parent;
    parent->children.push_back(std::move(node));
  }

  std::string read_name() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '>' &&
           src_[pos_] != '/') {
      ++pos_;
    }
    return to_lower(src_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
  }

  void read_end_tag() {
    pos_ += 2;
    std::string name = read_name();
    auto end = src_.find('>', pos_);
    pos_ = end == std::string_view::npos ? src_.size() : end + 1;
    close_element(name);
  }

  void read_start_tag() {
    ++pos_;
    auto node = std::make_unique<Node>();
    node->tag = read_name();
    bool self_closing = false;
    while (pos_ < src_.size()) {
      skip_space();
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '/') {
        ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '>') {
          self_closing = true;
          ++pos_;
          break;
        }
        continue;
      }
      read_attribute(*node);
    }
    open_element(std::move(node), self_closing);
  }

  void read_attribute(Node& node) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '=' &&
           src_[pos_] != '>' && (src_[pos_] != '/' || pos_ == start)) {
      ++pos_;
    }
    std::string name = to_lower(src_.substr(start, pos_ - start));
    std::string value;
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '=') {
      ++pos_;
      skip_space();
      if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
        char quote = src_[pos_++];
        auto end = src_.find(quote, pos_);
        if (end == std::string_view::npos) end = src_.size();
        value = decode_entities(src_.substr(pos_, end - pos_));
        pos_ = std::min(end + 1, src_.size());
      } else {
        std::size_t vstart = pos_;
        while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '>') ++pos_;
        value = decode_entities(src_.substr(vstart, pos_ - vstart));
      }
    }
    if (name.empty()) return;
    for (const auto& [existing, _] : node.attributes) {
      if (existing == name) return;  // first occurrence wins
    }
    node.attributes.emplace_back(std::move(name), std::move(value));
  }

  /// Index of the innermost open element named `tag`, searching no further
  /// out than any element in `boundary`. 0 means not found.
  std::size_t find_open(std::string_view tag,
                        std::initializer_list<std::string_view> boundary) const {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const std::string& open = stack_[i]->tag;
      if (open == tag) return i;
      if (one_of(open, boundary)) return 0;
    }
    return 0;
  }

  void pop_to(std::size_t index) {
    if (index > 0) stack_.resize(index);
  }

  void close_implied(std::initializer_list<std::string_view> tags,
                     std::initializer_list<std::string_view> boundary) {
    for (auto tag : tags) {
      if (auto i = find_open(tag, boundary)) {
        pop_to(i);
        return;
      }
    }
  }

  void apply_implied_end_tags(std::string_view tag) {
    if (closes_paragraph(tag)) {
      close_implied({"p"}, {"table", "td", "th", "caption", "button", "html", "body",
                            "object", "marquee", "applet"});
    }
    if (tag == "li") {
      close_implied({"li"}, {"ul", "ol", "menu", "table"});
    } else if (tag == "dt" || tag == "dd") {
      close_implied({"dt", "dd"}, {"dl", "table"});
    } else if (tag == "td" || tag == "th") {
      close_implied({"td", "th"}, {"tr", "table"});
    } else if (tag == "tr") {
      close_implied({"tr", "td", "th"}, {"table", "thead", "tbody", "tfoot"});
    } else if (tag == "thead" || tag == "tbody" || tag == "tfoot") {
      close_implied({"thead", "tbody", "tfoot", "tr", "td", "th"}, {"table"});
    } else if (tag == "option") {
      close_implied({"option"}, {"select", "datalist"});
    } else if (tag == "optgroup") {
      close_implied({"optgroup", "option"}, {"select"});
    }
  }

  void open_element(std::unique_ptr<Node> node, bool self_closing) {
    apply_implied_end_tags(node->tag);
    Node* parent = current();
    node->parent = parent;
    Node* raw = node.get();
    parent->children.push_back(std::move(node));
    if (is_raw_text(raw->tag) && !self_closing) {
      read_raw_text(*raw);
      return;
    }
    if (!self_closing && !is_void(raw->tag)) stack_.push_back(raw);
  }

  void read_raw_text(Node& element) {
    std::size_t end = pos_;
    for (;;) {
      end = src_.find("</", end);
      if (end == std::string_view::npos) {
        end = src_.size();
        break;
      }
      std::string_view candidate = src_.substr(end + 2, element.tag.size());
      if (to_lower(candidate) == element.tag) {
        std::size_t after = end + 2 + element.tag.size();
        if (after >= src_.size() || is_space(src_[after]) || src_[after] == '>' ||
            src_[after] == '/') {
          break;
        }
      }
      end += 2;
    }
    std::string_view body = src_.substr(pos_, end - pos_);
    if (!body.empty()) {
      auto text = std::make_unique<Node>();
      text->kind = NodeKind::Text;
      bool escapable = element.tag == "textarea" || element.tag == "title";
      text->text = escapable ? decode_entities(body) : std::string(body);
      text->parent = &element;
      element.children.push_back(std::move(text));
    }
    if (end >= src_.size()) {
      pos_ = src_.size();
      return;
    }
    auto close = src_.find('>', end);
    pos_ = close == std::string_view::npos ? src_.size() : close + 1;
  }

  void close_element(const std::string& name) {
    if (name.empty() || is_void(name)) return;
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->tag == name) {
        stack_.resize(i);
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::unique_ptr<Node> root_;
  std::vector<Node*> stack_;
};

void gather_text(const Node& node, std::string& out) {
  for (const auto& child : node.children) {
    if (child->kind == NodeKind::Text) {
      out += child->text;
    } else if (child->tag != "script" && child->tag != "style" && child->tag != "template") {
      gather_text(*child, out);
    }
  }
}

}  // namespace

std::optional<std::string_view> Node::attr(std::string_view name) const {
  for (const auto& [key, value] : attributes) {
    if (key == name) return std::string_view(value);
  }
  return std::nullopt;
}

bool Node::has_class(std::string_view cls) const {
  auto classes = attr("class");
  if (!classes) return false;
  std::string_view list = *classes;
  std::size_t i = 0;
  while (i < list.size()) {
    while (i < list.size() && is_space(list[i])) ++i;
    std::size_t start = i;
    while (i < list.size() && !is_space(list[i])) ++i;
    if (i > start && list.substr(start, i - start) == cls) return true;
  }
  return false;
}

const Node* Node::previous_element() const {
  if (!parent) return nullptr;
  const Node* prev = nullptr;
  for (const auto& sibling : parent->children) {
    if (sibling.get() == this) return prev;
    if (sibling->is_element()) prev = sibling.get();
  }
  return nullptr;
}

const Node* Node::next_element() const {
  if (!parent) return nullptr;
  bool seen = false;
  for (const auto& sibling : parent->children) {
    if (seen && sibling->is_element()) return sibling.get();
    if (sibling.get() == this) seen = true;
  }
  return nullptr;
}

Document Document::parse(std::string_view source) {
  Document doc;
  doc.root_ = TreeBuilder(source).run();
  return doc;
}

std::string text_content(const Node& node) {
  if (node.kind == NodeKind::Text) return collapse_whitespace(node.text);
  std::string raw;
  gather_text(node, raw);
  return collapse_whitespace(raw);
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    bool space = is_space(text[i]);
    if (!space && static_cast<unsigned char>(text[i]) == 0xC2 && i + 1 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0xA0) {
      space = true;
      ++i;
    }
    if (space) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += text[i];
  }
  return out;
}

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    std::size_t j = i + 1;
    if (j < text.size() && text[j] == '#') {
      ++j;
      bool hex = j < text.size() && (text[j] == 'x' || text[j] == 'X');
      if (hex) ++j;
      std::size_t digits_start = j;
      std::uint32_t cp = 0;
      while (j < text.size() &&
             (hex ? std::isxdigit(static_cast<unsigned char>(text[j]))
                  : std::isdigit(static_cast<unsigned char>(text[j])))) {
        int digit = std::isdigit(static_cast<unsigned char>(text[j]))
                        ? text[j] - '0'
                        : std::tolower(static_cast<unsigned char>(text[j])) - 'a' + 10;
        if (cp <= 0x10FFFF) cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(digit);
        ++j;
      }
      if (j == digits_start) {
        out += text[i++];
        continue;
      }
      if (j < text.size() && text[j] == ';') ++j;
      append_utf8(out, cp);
      i = j;
      continue;
    }
    while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
    if (j < text.size() && text[j] == ';') {
      std::string_view name = text.substr(i + 1, j - i - 1);
      auto it = std::find_if(kEntities.begin(), kEntities.end(),
                             [&](const NamedEntity& e) { return e.name == name; });
      if (it != kEntities.end()) {
        append_utf8(out, it->code_point);
        i = j + 1;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

}  // namespace curio::html
