#pragma once

// Minimal namespace-aware XML tree built on expat. Element and attribute
// names are expanded to (namespace URI, local name).

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alp/error.hpp"

namespace alp::xml {

class XmlError : public ParseError {
 public:
  XmlError(const std::string& message, long line, long column)
      : ParseError(message + " at line " + std::to_string(line) + ", column " +
                   std::to_string(column)),
        line_(line),
        column_(column) {}
  long line() const { return line_; }
  long column() const { return column_; }

 private:
  long line_;
  long column_;
};

struct Name {
  std::string ns;
  std::string local;

  friend auto operator<=>(const Name&, const Name&) = default;
};

struct Node {
  Name name;
  std::map<Name, std::string> attributes;
  std::string text;  // concatenated character data directly inside this element
  std::vector<Node> children;

  const Node* child(std::string_view local) const;
  std::vector<const Node*> children_named(std::string_view local) const;
  std::optional<std::string> attribute(std::string_view ns, std::string_view local) const;
  // Text of this element and all descendants.
  std::string deep_text() const;
};

// Parses a complete document (or a fragment with a single root). Throws XmlError.
Node parse(std::string_view document);

std::string escape(std::string_view text);
std::string escape_attribute(std::string_view text);

}  // namespace alp::xml
