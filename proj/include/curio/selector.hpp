#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curio/html.hpp"

namespace curio::html {

/// A compiled CSS selector group.
///
/// Supported: type and universal selectors, `#id`, `.class`, attribute
/// tests (`[a]`, `=`, `~=`, `|=`, `^=`, `$=`, `*=`, optional ` i` flag),
/// descendant / `>` / `+` / `~` combinators, comma groups, and the
/// structural pseudo-classes `:first-child`, `:last-child`, `:only-child`,
/// `:nth-child(an+b | odd | even)`, `:first-of-type`, `:last-of-type` and
/// `:not(<compound>)`.
class Selector {
 public:
  /// Throws SelectorSyntaxError.
  static Selector compile(std::string_view text);

  bool matches(const Node& element) const;

  /// All matching elements beneath `scope`, in document order.
  std::vector<const Node*> select_all(const Node& scope) const;
  const Node* select_first(const Node& scope) const;

  const std::string& source() const { return source_; }

  struct AttributeTest {
    enum class Op { Exists, Equals, Includes, DashMatch, Prefix, Suffix, Substring };
    std::string name;
    Op op = Op::Exists;
    std::string value;
    bool ignore_case = false;
  };
  struct Compound;
  struct Pseudo {
    enum class Kind { FirstChild, LastChild, OnlyChild, NthChild, FirstOfType, LastOfType, Not };
    Kind kind = Kind::FirstChild;
    long a = 0;
    long b = 0;
    std::vector<Compound> negated;
  };
  struct Compound {
    std::string tag;  // empty = any
    std::vector<std::string> ids;
    std::vector<std::string> classes;
    std::vector<AttributeTest> attributes;
    std::vector<Pseudo> pseudos;
  };
  enum class Combinator { Descendant, Child, Adjacent, Sibling };
  struct Complex {
    std::vector<Compound> compounds;
    std::vector<Combinator> combinators;  // combinators[i] joins compounds[i] and [i+1]
  };

 private:
  std::string source_;
  std::vector<Complex> alternatives_;
};

/// A field selector: a CSS selector optionally suffixed with `@attr` to
/// extract an attribute value rather than the element text.
struct FieldSelector {
  Selector selector;
  std::optional<std::string> attribute;

  static FieldSelector compile(std::string_view text);

  /// Value of the first match (collapsed text or attribute), or "" when
  /// nothing matches.
  std::string extract(const Node& scope) const;
};

}  // namespace curio::html
