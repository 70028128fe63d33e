#include <algorithm>
#include <cctype>

#include "alp/query.hpp"
#include "alp/textnorm.hpp"

namespace alp::query {

namespace {

constexpr std::array<std::string_view, kFieldCount> kFieldNames = {
    "title", "creator", "date", "publisher", "subject", "language", "library", "marktype", "any"};

enum class Tok { LParen, RParen, LBracket, RBracket, Colon, Word, Quoted, And, Or, Not, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

bool is_delimiter(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '"' || c == ':';
}

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::vector<Token> lex(std::string_view in) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < in.size()) {
    const char c = in[i];
    if (is_blank(c)) {
      ++i;
      continue;
    }
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", i++}); continue;
      case ')': out.push_back({Tok::RParen, ")", i++}); continue;
      case '[': out.push_back({Tok::LBracket, "[", i++}); continue;
      case ']': out.push_back({Tok::RBracket, "]", i++}); continue;
      case ':': out.push_back({Tok::Colon, ":", i++}); continue;
      case '"': {
        const std::size_t start = i++;
        const std::size_t close = in.find('"', i);
        if (close == std::string_view::npos) throw QueryError("unterminated quote", start);
        out.push_back({Tok::Quoted, std::string(in.substr(i, close - i)), start});
        i = close + 1;
        continue;
      }
      default: break;
    }
    const std::size_t start = i;
    while (i < in.size() && !is_blank(in[i]) && !is_delimiter(in[i])) ++i;
    std::string word(in.substr(start, i - start));
    Tok kind = Tok::Word;
    if (word == "AND") kind = Tok::And;
    else if (word == "OR") kind = Tok::Or;
    else if (word == "NOT") kind = Tok::Not;
    out.push_back({kind, std::move(word), start});
  }
  out.push_back({Tok::End, "", in.size()});
  return out;
}

std::optional<int> parse_year(std::string_view text) {
  if (text.empty() || text.size() > 4) return std::nullopt;
  int year = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    year = year * 10 + (c - '0');
  }
  return year;
}

class Parser {
 public:
  explicit Parser(std::string_view input) : toks_(lex(input)) {}

  Node parse() {
    if (peek().kind == Tok::End) throw QueryError("empty query", 0);
    Node root = parse_or();
    if (peek().kind != Tok::End) throw QueryError("unexpected '" + peek().text + "'", peek().offset);
    return root;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      const std::string got = peek().kind == Tok::End ? "end of query" : "'" + peek().text + "'";
      throw QueryError(std::string("expected ") + what + ", found " + got, peek().offset);
    }
    return next();
  }

  bool starts_operand() const {
    switch (peek().kind) {
      case Tok::LParen:
      case Tok::Word:
      case Tok::Quoted:
      case Tok::Not: return true;
      default: return false;
    }
  }

  Node parse_or() {
    std::vector<Node> parts;
    parts.push_back(parse_and());
    while (peek().kind == Tok::Or) {
      next();
      parts.push_back(parse_and());
    }
    return Node::make_or(std::move(parts));
  }

  Node parse_and() {
    std::vector<Node> parts;
    parts.push_back(parse_not());
    for (;;) {
      if (peek().kind == Tok::And) {
        next();
        parts.push_back(parse_not());
      } else if (starts_operand()) {
        parts.push_back(parse_not());
      } else {
        break;
      }
    }
    return Node::make_and(std::move(parts));
  }

  Node parse_not() {
    if (peek().kind == Tok::Not) {
      next();
      return Node::make_not(parse_not());
    }
    return parse_primary();
  }

  Node parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      next();
      Node inner = parse_or();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::Quoted) {
      next();
      return text_node(Field::Any, t.text, t.offset);
    }
    if (t.kind == Tok::Word) {
      next();
      if (peek().kind == Tok::Colon) {
        const auto field = parse_field(t.text);
        if (!field) throw QueryError("unknown field '" + t.text + "'", t.offset);
        next();
        return parse_value(*field);
      }
      return text_node(Field::Any, t.text, t.offset);
    }
    const std::string got = t.kind == Tok::End ? "end of query" : "'" + t.text + "'";
    throw QueryError("expected a term, found " + got, t.offset);
  }

  Node parse_value(Field field) {
    const Token& t = peek();
    if (t.kind == Tok::LBracket) {
      next();
      if (field != Field::Date) throw QueryError("ranges are only allowed on date", t.offset);
      const int lo = year_token();
      expect(Tok::Word, "'TO'");
      if (toks_[pos_ - 1].text != "TO") {
        throw QueryError("expected 'TO', found '" + toks_[pos_ - 1].text + "'",
                         toks_[pos_ - 1].offset);
      }
      const int hi = year_token();
      expect(Tok::RBracket, "']'");
      if (lo > hi) throw QueryError("inverted range", t.offset);
      return Node::make_range(lo, hi);
    }
    if (t.kind == Tok::Word || t.kind == Tok::Quoted) {
      next();
      if (field == Field::Date) {
        const auto year = parse_year(textnorm::trim(t.text));
        if (!year) throw QueryError("date expects a year or [YYYY TO YYYY]", t.offset);
        return Node::make_range(*year, *year);
      }
      return text_node(field, t.text, t.offset);
    }
    const std::string got = t.kind == Tok::End ? "end of query" : "'" + t.text + "'";
    throw QueryError("expected a value, found " + got, t.offset);
  }

  int year_token() {
    const Token& t = expect(Tok::Word, "a year");
    const auto year = parse_year(t.text);
    if (!year) throw QueryError("expected a year, found '" + t.text + "'", t.offset);
    return *year;
  }

  static Node text_node(Field field, const std::string& text, std::size_t offset) {
    auto tokens = textnorm::tokenize(text);
    if (tokens.empty()) throw QueryError("no searchable characters", offset);
    if (field == Field::Any && tokens.size() == 1) return Node::make_term(std::move(tokens[0]));
    return Node::make_phrase(field, std::move(tokens));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Pure negation: a Not is only meaningful inside an And that has at least one
// positive operand.
void check_negation(const Node& node, bool allowed) {
  if (node.kind == Node::Kind::Not && !allowed) {
    throw QueryError("pure negation: NOT needs a positive term in the same AND group", 0);
  }
  if (node.kind == Node::Kind::And) {
    const bool has_positive = std::any_of(node.children.begin(), node.children.end(),
                                          [](const Node& c) { return c.kind != Node::Kind::Not; });
    for (const auto& c : node.children) check_negation(c, has_positive);
    return;
  }
  for (const auto& c : node.children) check_negation(c, false);
}

bool needs_parens(const Node& child, Node::Kind parent) {
  if (child.kind == Node::Kind::Or) return parent != Node::Kind::Or;
  if (child.kind == Node::Kind::And) return parent == Node::Kind::Not || parent == Node::Kind::And;
  return false;
}

void print(const Node& node, std::string& out) {
  auto child = [&](const Node& c, Node::Kind parent) {
    if (needs_parens(c, parent)) {
      out += '(';
      print(c, out);
      out += ')';
    } else {
      print(c, out);
    }
  };
  switch (node.kind) {
    case Node::Kind::Or:
    case Node::Kind::And: {
      const char* sep = node.kind == Node::Kind::Or ? " OR " : " AND ";
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += sep;
        child(node.children[i], node.kind);
      }
      break;
    }
    case Node::Kind::Not:
      out += "NOT ";
      child(node.children.at(0), Node::Kind::Not);
      break;
    case Node::Kind::Term:
      out += node.token;
      break;
    case Node::Kind::Fielded:
      out += to_string(node.field);
      out += ':';
      if (node.range) {
        out += '[' + std::to_string(node.range->lo) + " TO " + std::to_string(node.range->hi) + ']';
      } else {
        out += '"';
        for (std::size_t i = 0; i < node.phrase.size(); ++i) {
          if (i) out += ' ';
          out += node.phrase[i];
        }
        out += '"';
      }
      break;
  }
}

}  // namespace

std::string_view to_string(Field field) { return kFieldNames[static_cast<std::size_t>(field)]; }

std::optional<Field> parse_field(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (kFieldNames[i] == lower) return static_cast<Field>(i);
  }
  return std::nullopt;
}

Node Node::make_or(std::vector<Node> children) {
  std::vector<Node> flat;
  for (auto& c : children) {
    if (c.kind == Kind::Or) {
      for (auto& g : c.children) flat.push_back(std::move(g));
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.size() == 1) return std::move(flat.front());
  Node n;
  n.kind = Kind::Or;
  n.children = std::move(flat);
  return n;
}

Node Node::make_and(std::vector<Node> children) {
  std::vector<Node> flat;
  for (auto& c : children) {
    if (c.kind == Kind::And) {
      for (auto& g : c.children) flat.push_back(std::move(g));
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.size() == 1) return std::move(flat.front());
  Node n;
  n.kind = Kind::And;
  n.children = std::move(flat);
  return n;
}

Node Node::make_not(Node child) {
  if (child.kind == Kind::Not) return std::move(child.children.front());
  Node n;
  n.kind = Kind::Not;
  n.children.push_back(std::move(child));
  return n;
}

Node Node::make_term(std::string token) {
  Node n;
  n.kind = Kind::Term;
  n.token = std::move(token);
  return n;
}

Node Node::make_phrase(Field field, std::vector<std::string> tokens) {
  Node n;
  n.kind = Kind::Fielded;
  n.field = field;
  n.phrase = std::move(tokens);
  return n;
}

Node Node::make_range(int lo, int hi) {
  Node n;
  n.kind = Kind::Fielded;
  n.field = Field::Date;
  n.range = YearRange{lo, hi};
  return n;
}

Node parse_query(std::string_view input, Mode mode) {
  if (mode == Mode::Simple) {
    auto tokens = textnorm::tokenize(input);
    if (tokens.empty()) throw QueryError("empty query", 0);
    Node root;
    root.kind = Node::Kind::And;
    for (auto& t : tokens) root.children.push_back(Node::make_term(std::move(t)));
    return root;
  }
  Node root = Parser(input).parse();
  check_negation(root, false);
  return root;
}

std::string to_query_string(const Node& node) {
  std::string out;
  print(node, out);
  return out;
}

}  // namespace alp::query
