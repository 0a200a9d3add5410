#include "curio/selector.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "curio/errors.hpp"

namespace curio::html {

namespace {

using AttrOp = Selector::AttributeTest::Op;
using PseudoKind = Selector::Pseudo::Kind;

bool is_ident_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '-' || c == '_' || u >= 0x80;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<Selector::Complex> parse_group() {
    std::vector<Selector::Complex> group;
    for (;;) {
      skip_space();
      group.push_back(parse_complex());
      skip_space();
      if (at_end()) break;
      if (peek() != ',') fail("unexpected '" + std::string(1, peek()) + "'");
      ++pos_;
    }
    return group;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw SelectorSyntaxError(std::string(text_), why + " at offset " + std::to_string(pos_));
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  bool skip_space() {
    std::size_t start = pos_;
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    return pos_ > start;
  }

  std::string ident() {
    std::string out;
    while (!at_end()) {
      if (peek() == '\\' && pos_ + 1 < text_.size()) {
        out += text_[pos_ + 1];
        pos_ += 2;
      } else if (is_ident_char(peek())) {
        out += text_[pos_++];
      } else {
        break;
      }
    }
    if (out.empty()) fail("expected identifier");
    return out;
  }

  Selector::Complex parse_complex() {
    Selector::Complex complex;
    complex.compounds.push_back(parse_compound());
    for (;;) {
      bool spaced = skip_space();
      if (at_end() || peek() == ',' || peek() == ')') break;
      Selector::Combinator comb = Selector::Combinator::Descendant;
      if (peek() == '>') {
        comb = Selector::Combinator::Child;
      } else if (peek() == '+') {
        comb = Selector::Combinator::Adjacent;
      } else if (peek() == '~') {
        comb = Selector::Combinator::Sibling;
      } else if (!spaced) {
        fail("expected combinator");
      }
      if (comb != Selector::Combinator::Descendant) {
        ++pos_;
        skip_space();
      }
      complex.combinators.push_back(comb);
      complex.compounds.push_back(parse_compound());
    }
    return complex;
  }

  Selector::Compound parse_compound() {
    Selector::Compound compound;
    bool any = false;
    if (peek() == '*') {
      ++pos_;
      any = true;
    } else if (!at_end() && is_ident_char(peek())) {
      compound.tag = lower(ident());
      any = true;
    }
    for (;;) {
      char c = peek();
      if (c == '#') {
        ++pos_;
        compound.ids.push_back(ident());
      } else if (c == '.') {
        ++pos_;
        compound.classes.push_back(ident());
      } else if (c == '[') {
        compound.attributes.push_back(parse_attribute());
      } else if (c == ':') {
        compound.pseudos.push_back(parse_pseudo());
      } else {
        break;
      }
      any = true;
    }
    if (!any) fail("empty compound selector");
    return compound;
  }

  Selector::AttributeTest parse_attribute() {
    ++pos_;  // '['
    skip_space();
    Selector::AttributeTest test;
    test.name = lower(ident());
    skip_space();
    if (peek() == ']') {
      ++pos_;
      return test;
    }
    char c = peek();
    if (c == '=') {
      test.op = AttrOp::Equals;
      ++pos_;
    } else {
      switch (c) {
        case '~': test.op = AttrOp::Includes; break;
        case '|': test.op = AttrOp::DashMatch; break;
        case '^': test.op = AttrOp::Prefix; break;
        case '$': test.op = AttrOp::Suffix; break;
        case '*': test.op = AttrOp::Substring; break;
        default: fail("bad attribute operator");
      }
      ++pos_;
      if (peek() != '=') fail("expected '='");
      ++pos_;
    }
    skip_space();
    if (peek() == '"' || peek() == '\'') {
      char quote = text_[pos_++];
      auto end = text_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated string");
      test.value = std::string(text_.substr(pos_, end - pos_));
      pos_ = end + 1;
    } else {
      test.value = ident();
    }
    skip_space();
    if (peek() == 'i' || peek() == 'I') {
      test.ignore_case = true;
      ++pos_;
      skip_space();
    }
    if (peek() != ']') fail("expected ']'");
    ++pos_;
    return test;
  }

  Selector::Pseudo parse_pseudo() {
    ++pos_;  // ':'
    std::string name = lower(ident());
    Selector::Pseudo pseudo;
    if (name == "first-child") {
      pseudo.kind = PseudoKind::FirstChild;
    } else if (name == "last-child") {
      pseudo.kind = PseudoKind::LastChild;
    } else if (name == "only-child") {
      pseudo.kind = PseudoKind::OnlyChild;
    } else if (name == "first-of-type") {
      pseudo.kind = PseudoKind::FirstOfType;
    } else if (name == "last-of-type") {
      pseudo.kind = PseudoKind::LastOfType;
    } else if (name == "nth-child") {
      pseudo.kind = PseudoKind::NthChild;
      std::string arg = parenthesised();
      parse_nth(arg, pseudo);
    } else if (name == "not") {
      pseudo.kind = PseudoKind::Not;
      if (peek() != '(') fail("expected '('");
      ++pos_;
      for (;;) {
        skip_space();
        pseudo.negated.push_back(parse_compound());
        skip_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() != ')') fail("expected ')'");
        ++pos_;
        break;
      }
    } else {
      fail("unsupported pseudo-class :" + name);
    }
    return pseudo;
  }

  std::string parenthesised() {
    if (peek() != '(') fail("expected '('");
    auto end = text_.find(')', pos_);
    if (end == std::string_view::npos) fail("expected ')'");
    std::string arg(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return arg;
  }

  void parse_nth(std::string arg, Selector::Pseudo& pseudo) {
    arg.erase(std::remove_if(arg.begin(), arg.end(),
                             [](unsigned char c) { return std::isspace(c); }),
              arg.end());
    arg = lower(arg);
    if (arg == "odd") {
      pseudo.a = 2;
      pseudo.b = 1;
      return;
    }
    if (arg == "even") {
      pseudo.a = 2;
      pseudo.b = 0;
      return;
    }
    auto read_int = [&](std::size_t& i, long& out) {
      std::size_t start = i;
      while (i < arg.size() && std::isdigit(static_cast<unsigned char>(arg[i]))) ++i;
      if (i == start) return false;
      out = std::stol(arg.substr(start, i - start));
      return true;
    };
    std::size_t i = 0;
    auto n = arg.find('n');
    if (n == std::string::npos) {
      long sign = 1;
      if (i < arg.size() && (arg[i] == '+' || arg[i] == '-')) sign = arg[i++] == '-' ? -1 : 1;
      long b = 0;
      if (!read_int(i, b) || i != arg.size()) fail("bad nth-child argument");
      pseudo.a = 0;
      pseudo.b = sign * b;
      return;
    }
    long sign = 1;
    if (i < arg.size() && (arg[i] == '+' || arg[i] == '-')) sign = arg[i++] == '-' ? -1 : 1;
    long a = 1;
    if (i < n && (!read_int(i, a) || i != n)) fail("bad nth-child argument");
    pseudo.a = sign * a;
    i = n + 1;
    pseudo.b = 0;
    if (i < arg.size()) {
      long bsign = arg[i] == '-' ? -1 : 1;
      if (arg[i] != '+' && arg[i] != '-') fail("bad nth-child argument");
      ++i;
      long b = 0;
      if (!read_int(i, b) || i != arg.size()) fail("bad nth-child argument");
      pseudo.b = bsign * b;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool attribute_matches(const Selector::AttributeTest& test, const Node& element) {
  auto value = element.attr(test.name);
  if (!value) return false;
  if (test.op == AttrOp::Exists) return true;
  std::string have(*value);
  std::string want = test.value;
  if (test.ignore_case) {
    have = lower(have);
    want = lower(want);
  }
  switch (test.op) {
    case AttrOp::Equals:
      return have == want;
    case AttrOp::Includes: {
      if (want.empty()) return false;
      std::size_t i = 0;
      while (i < have.size()) {
        while (i < have.size() && std::isspace(static_cast<unsigned char>(have[i]))) ++i;
        std::size_t start = i;
        while (i < have.size() && !std::isspace(static_cast<unsigned char>(have[i]))) ++i;
        if (i > start && have.compare(start, i - start, want) == 0) return true;
      }
      return false;
    }
    case AttrOp::DashMatch:
      return have == want || std::string_view(have).starts_with(want + "-");
    case AttrOp::Prefix:
      return !want.empty() && std::string_view(have).starts_with(want);
    case AttrOp::Suffix:
      return !want.empty() && std::string_view(have).ends_with(want);
    case AttrOp::Substring:
      return !want.empty() && have.find(want) != std::string::npos;
    case AttrOp::Exists:
      break;
  }
  return true;
}

std::vector<const Node*> element_siblings(const Node& element) {
  std::vector<const Node*> out;
  if (!element.parent) return {&element};
  for (const auto& child : element.parent->children) {
    if (child->is_element()) out.push_back(child.get());
  }
  return out;
}

bool compound_matches(const Selector::Compound& compound, const Node& element);

bool pseudo_matches(const Selector::Pseudo& pseudo, const Node& element) {
  if (pseudo.kind == PseudoKind::Not) {
    return std::none_of(pseudo.negated.begin(), pseudo.negated.end(),
                        [&](const auto& c) { return compound_matches(c, element); });
  }
  auto siblings = element_siblings(element);
  auto it = std::find(siblings.begin(), siblings.end(), &element);
  auto position = static_cast<long>(it - siblings.begin()) + 1;
  auto same_type = [&](const Node* n) { return n->tag == element.tag; };
  switch (pseudo.kind) {
    case PseudoKind::FirstChild:
      return position == 1;
    case PseudoKind::LastChild:
      return position == static_cast<long>(siblings.size());
    case PseudoKind::OnlyChild:
      return siblings.size() == 1;
    case PseudoKind::FirstOfType:
      return std::find_if(siblings.begin(), siblings.end(), same_type) == it;
    case PseudoKind::LastOfType:
      return std::find_if(siblings.rbegin(), siblings.rend(), same_type).base() - 1 == it;
    case PseudoKind::NthChild: {
      if (pseudo.a == 0) return position == pseudo.b;
      long diff = position - pseudo.b;
      return diff % pseudo.a == 0 && diff / pseudo.a >= 0;
    }
    case PseudoKind::Not:
      break;
  }
  return false;
}

bool compound_matches(const Selector::Compound& compound, const Node& element) {
  if (!element.is_element()) return false;
  if (!compound.tag.empty() && compound.tag != element.tag) return false;
  for (const auto& id : compound.ids) {
    auto have = element.attr("id");
    if (!have || *have != id) return false;
  }
  for (const auto& cls : compound.classes) {
    if (!element.has_class(cls)) return false;
  }
  for (const auto& test : compound.attributes) {
    if (!attribute_matches(test, element)) return false;
  }
  for (const auto& pseudo : compound.pseudos) {
    if (!pseudo_matches(pseudo, element)) return false;
  }
  return true;
}

const Node* element_parent(const Node& node) {
  const Node* p = node.parent;
  return p && p->is_element() ? p : nullptr;
}

bool complex_matches(const Selector::Complex& complex, std::size_t index, const Node& element) {
  if (!compound_matches(complex.compounds[index], element)) return false;
  if (index == 0) return true;
  switch (complex.combinators[index - 1]) {
    case Selector::Combinator::Child: {
      const Node* parent = element_parent(element);
      return parent && complex_matches(complex, index - 1, *parent);
    }
    case Selector::Combinator::Descendant:
      for (const Node* a = element_parent(element); a; a = element_parent(*a)) {
        if (complex_matches(complex, index - 1, *a)) return true;
      }
      return false;
    case Selector::Combinator::Adjacent: {
      const Node* prev = element.previous_element();
      return prev && complex_matches(complex, index - 1, *prev);
    }
    case Selector::Combinator::Sibling:
      for (const Node* s = element.previous_element(); s; s = s->previous_element()) {
        if (complex_matches(complex, index - 1, *s)) return true;
      }
      return false;
  }
  return false;
}

}  // namespace

Selector Selector::compile(std::string_view text) {
  Selector sel;
  sel.source_ = std::string(text);
  sel.alternatives_ = Parser(text).parse_group();
  return sel;
}

bool Selector::matches(const Node& element) const {
  if (!element.is_element()) return false;
  return std::any_of(alternatives_.begin(), alternatives_.end(), [&](const Complex& c) {
    return complex_matches(c, c.compounds.size() - 1, element);
  });
}

std::vector<const Node*> Selector::select_all(const Node& scope) const {
  std::vector<const Node*> out;
  std::function<void(const Node&)> walk = [&](const Node& node) {
    for (const auto& child : node.children) {
      if (!child->is_element()) continue;
      if (matches(*child)) out.push_back(child.get());
      walk(*child);
    }
  };
  walk(scope);
  return out;
}

const Node* Selector::select_first(const Node& scope) const {
  std::function<const Node*(const Node&)> walk = [&](const Node& node) -> const Node* {
    for (const auto& child : node.children) {
      if (!child->is_element()) continue;
      if (matches(*child)) return child.get();
      if (const Node* found = walk(*child)) return found;
    }
    return nullptr;
  };
  return walk(scope);
}

FieldSelector FieldSelector::compile(std::string_view text) {
  FieldSelector field;
  // '@' never occurs in CSS outside strings, so the last one splits off the attribute.
  auto at = text.rfind('@');
  if (at != std::string_view::npos && text.find_first_of("\"']", at) == std::string_view::npos) {
    std::string attr = lower(std::string(text.substr(at + 1)));
    if (attr.empty() || !std::all_of(attr.begin(), attr.end(), is_ident_char)) {
      throw SelectorSyntaxError(std::string(text), "bad attribute suffix");
    }
    field.attribute = std::move(attr);
    text = text.substr(0, at);
  }
  field.selector = Selector::compile(text);
  return field;
}

std::string FieldSelector::extract(const Node& scope) const {
  const Node* hit = selector.select_first(scope);
  if (!hit) return {};
  if (!attribute) return text_content(*hit);
  auto value = hit->attr(*attribute);
  return value ? collapse_whitespace(*value) : std::string();
}

}  // namespace curio::html
