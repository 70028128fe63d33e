#include "alp/xml.hpp"

#include <expat.h>

#include <memory>

namespace alp::xml {
namespace {

Name split_name(const XML_Char* raw) {
  std::string_view s(raw);
  const auto sep = s.find(' ');
  if (sep == std::string_view::npos) return Name{"", std::string(s)};
  return Name{std::string(s.substr(0, sep)), std::string(s.substr(sep + 1))};
}

struct Builder {
  Node root;
  std::vector<Node*> stack;
  bool have_root = false;
};

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* b = static_cast<Builder*>(user);
  Node node;
  node.name = split_name(name);
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    node.attributes.emplace(split_name(attrs[i]), attrs[i + 1]);
  }
  if (b->stack.empty()) {
    b->root = std::move(node);
    b->have_root = true;
    b->stack.push_back(&b->root);
  } else {
    auto& siblings = b->stack.back()->children;
    siblings.push_back(std::move(node));
    b->stack.push_back(&siblings.back());
  }
}

void on_end(void* user, const XML_Char*) {
  static_cast<Builder*>(user)->stack.pop_back();
}

void on_text(void* user, const XML_Char* s, int len) {
  auto* b = static_cast<Builder*>(user);
  if (!b->stack.empty()) b->stack.back()->text.append(s, static_cast<std::size_t>(len));
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

}  // namespace

const Node* Node::child(std::string_view local) const {
  for (const auto& c : children) {
    if (c.name.local == local) return &c;
  }
  return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view local) const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (c.name.local == local) out.push_back(&c);
  }
  return out;
}

std::optional<std::string> Node::attribute(std::string_view ns, std::string_view local) const {
  auto it = attributes.find(Name{std::string(ns), std::string(local)});
  if (it == attributes.end()) return std::nullopt;
  return it->second;
}

std::string Node::deep_text() const {
  std::string out = text;
  for (const auto& c : children) out += c.deep_text();
  return out;
}

Node parse(std::string_view document) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser(
      XML_ParserCreateNS("UTF-8", ' '));
  if (!parser) throw ParseError("cannot create XML parser");
  // Only the innermost open element gains children, so pointers held in the
  // stack stay valid while siblings are appended.
  Builder builder;
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), 1) ==
      XML_STATUS_ERROR) {
    throw XmlError(XML_ErrorString(XML_GetErrorCode(parser.get())),
                   static_cast<long>(XML_GetCurrentLineNumber(parser.get())),
                   static_cast<long>(XML_GetCurrentColumnNumber(parser.get())));
  }
  if (!builder.have_root) throw XmlError("no root element", 1, 0);
  return std::move(builder.root);
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string escape_attribute(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace alp::xml
