#pragma once

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "datr/core.hpp"

namespace datr {

enum class TokenKind {
  NodeName,   // starts with an uppercase letter
  AtomText,   // starts with a lowercase letter or digit
  Colon,      // :
  PathOpen,   // <
  PathClose,  // >
  Defines,    // ==
  Quote,      // "
  LParen,     // (
  RParen,     // )
  Dot,        // .
  End,
};

struct Token {
  TokenKind kind;
  std::string text;
  int line = 0;
  int column = 0;
};

inline const char* token_kind_name(TokenKind k) {
  switch (k) {
    case TokenKind::NodeName: return "node name";
    case TokenKind::AtomText: return "atom";
    case TokenKind::Colon: return "':'";
    case TokenKind::PathOpen: return "'<'";
    case TokenKind::PathClose: return "'>'";
    case TokenKind::Defines: return "'=='";
    case TokenKind::Quote: return "'\"'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

// Lexical policy: node names start with an uppercase letter, atoms with a
// lowercase letter or digit; both continue with letters, digits, '_', '-'.
// Comments run from '%' to end of line.
inline std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto peek = [&](size_t k = 0) -> char {
    return i + k < source.size() ? source[i + k] : '\0';
  };
  auto advance = [&]() {
    if (source[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  };

  while (i < source.size()) {
    char c = peek();
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (c == '%') {
      while (i < source.size() && peek() != '\n') advance();
      continue;
    }
    int tl = line, tc = col;
    if (c == '=' && peek(1) == '=') {
      advance();
      advance();
      out.push_back({TokenKind::Defines, "==", tl, tc});
      continue;
    }
    switch (c) {
      case ':': advance(); out.push_back({TokenKind::Colon, ":", tl, tc}); continue;
      case '<': advance(); out.push_back({TokenKind::PathOpen, "<", tl, tc}); continue;
      case '>': advance(); out.push_back({TokenKind::PathClose, ">", tl, tc}); continue;
      case '"': advance(); out.push_back({TokenKind::Quote, "\"", tl, tc}); continue;
      case '(': advance(); out.push_back({TokenKind::LParen, "(", tl, tc}); continue;
      case ')': advance(); out.push_back({TokenKind::RParen, ")", tl, tc}); continue;
      case '.': advance(); out.push_back({TokenKind::Dot, ".", tl, tc}); continue;
      default: break;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string text;
      while (i < source.size() && word_char(peek())) {
        text += peek();
        advance();
      }
      out.push_back({TokenKind::NodeName, text, tl, tc});
      continue;
    }
    if (std::islower(static_cast<unsigned char>(c)) ||
        std::isdigit(static_cast<unsigned char>(c))) {
      std::string text;
      while (i < source.size() && word_char(peek())) {
        text += peek();
        advance();
      }
      out.push_back({TokenKind::AtomText, text, tl, tc});
      continue;
    }
    throw TheoryError("IllegalCharacter",
                      std::string("illegal character '") + c + "'", tl, tc);
  }
  out.push_back({TokenKind::End, "", line, col});
  return out;
}

namespace detail {

class TheoryParser {
 public:
  explicit TheoryParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Theory parse() {
    std::vector<Sentence> sentences;
    std::set<std::pair<std::string, AttrPath>> seen;
    std::string current_node;
    while (peek().kind != TokenKind::End) {
      if (peek().kind == TokenKind::NodeName) {
        current_node = peek().text;
        next();
        expect(TokenKind::Colon);
      } else if (current_node.empty()) {
        fail("node name");
      }
      Sentence s = parse_sentence(current_node);
      if (!seen.insert({s.node, s.lhs_path}).second)
        throw TheoryError("DuplicateLhs",
                          "duplicate left-hand side " + s.node + ":" +
                              path_to_string(s.lhs_path),
                          s.line, s.column);
      sentences.push_back(std::move(s));
    }
    return Theory(std::move(sentences));
  }

 private:
  const Token& peek(size_t k = 0) const {
    size_t j = pos_ + k;
    return j < tokens_.size() ? tokens_[j] : tokens_.back();
  }
  const Token& next() { return tokens_[pos_++]; }
  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw TheoryError("SyntaxError",
                      "expected " + expected + ", found " +
                          token_kind_name(t.kind) +
                          (t.text.empty() ? "" : " '" + t.text + "'"),
                      t.line, t.column);
  }
  Token expect(TokenKind kind) {
    if (peek().kind != kind) fail(token_kind_name(kind));
    return next();
  }

  AttrPath parse_path() {
    expect(TokenKind::PathOpen);
    AttrPath path;
    while (peek().kind != TokenKind::PathClose) {
      if (peek().kind == TokenKind::AtomText) {
        path.push_back(next().text);
      } else if (peek().kind == TokenKind::Quote ||
                 peek().kind == TokenKind::PathOpen ||
                 peek().kind == TokenKind::NodeName) {
        throw TheoryError("EvaluablePathUnsupported",
                          "evaluable paths (descriptors embedded in a path) "
                          "are not supported",
                          peek().line, peek().column);
      } else {
        fail("attribute atom or '>'");
      }
    }
    next();
    return path;
  }

  Sentence parse_sentence(const std::string& node) {
    Sentence s;
    s.node = node;
    s.line = peek().line;
    s.column = peek().column;
    s.lhs_path = parse_path();
    expect(TokenKind::Defines);
    while (peek().kind != TokenKind::Dot) s.rhs.push_back(parse_descriptor());
    next();  // '.'
    // `== ()` and a bare `==` both denote the empty value.
    if (s.rhs.size() == 1 && s.rhs[0].kind == DescriptorKind::EmptyValue)
      s.rhs.clear();
    return s;
  }

  Descriptor parse_descriptor() {
    switch (peek().kind) {
      case TokenKind::AtomText:
        return Descriptor::atom_value(next().text);
      case TokenKind::LParen:
        next();
        expect(TokenKind::RParen);
        return Descriptor::empty_value();
      case TokenKind::PathOpen:
        return Descriptor::local_path(parse_path());
      case TokenKind::NodeName: {
        std::string n = next().text;
        if (peek().kind == TokenKind::Colon) {
          next();
          return Descriptor::local_node_path(n, parse_path());
        }
        return Descriptor::local_node(n);
      }
      case TokenKind::Quote: {
        next();
        Descriptor d;
        if (peek().kind == TokenKind::PathOpen) {
          d = Descriptor::global_path(parse_path());
        } else if (peek().kind == TokenKind::NodeName) {
          std::string n = next().text;
          if (peek().kind == TokenKind::Colon) {
            next();
            d = Descriptor::global_node_path(n, parse_path());
          } else {
            d = Descriptor::global_node(n);
          }
        } else {
          fail("node name or '<' inside quotes");
        }
        expect(TokenKind::Quote);
        return d;
      }
      default:
        fail("descriptor or '.'");
    }
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

}  // namespace detail

inline Theory parse_theory(std::vector<Token> tokens) {
  return detail::TheoryParser(std::move(tokens)).parse();
}

inline Theory parse_theory_text(std::string_view source) {
  return parse_theory(tokenize(source));
}

struct Diagnostic {
  std::string kind;
  std::string message;
};

// Non-fatal checks: references to undefined nodes and inheritance cycles
// that put forward evaluation at risk of non-termination. Quoted path
// descriptors contribute no edge (their target node is the runtime global).
inline std::vector<Diagnostic> validate_theory(const Theory& theory) {
  std::vector<Diagnostic> out;
  std::set<std::string> reported;
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& s : theory.sentences()) {
    for (const auto& d : s.rhs) {
      if (d.has_node()) {
        if (!theory.defines_node(d.node) && reported.insert(d.node).second)
          out.push_back({"UndefinedNode",
                         "node " + d.node + " is referenced but never defined"});
        edges[s.node].insert(d.node);
      } else if (d.kind == DescriptorKind::LocalPath) {
        edges[s.node].insert(s.node);
      }
    }
  }
  // Cycle scan over the node-reference graph.
  std::set<std::string> done;
  for (const auto& start : theory.node_names()) {
    if (done.count(start)) continue;
    std::vector<std::pair<std::string, bool>> stack{{start, false}};
    std::set<std::string> on_path;
    bool cycle = false;
    std::vector<std::string> witness;
    while (!stack.empty() && !cycle) {
      auto [node, leaving] = stack.back();
      stack.pop_back();
      if (leaving) {
        on_path.erase(node);
        continue;
      }
      if (on_path.count(node)) continue;
      on_path.insert(node);
      done.insert(node);
      stack.push_back({node, true});
      for (const auto& succ : edges[node]) {
        if (on_path.count(succ)) {
          cycle = true;
          witness = {node, succ};
          break;
        }
        if (!done.count(succ)) stack.push_back({succ, false});
      }
    }
    if (cycle) {
      out.push_back({"RecursionRisk",
                     "recursive definition involving " + witness[0] + " and " +
                         witness[1] + " may not terminate without limits"});
      break;
    }
  }
  return out;
}

inline std::string descriptor_to_string(const Descriptor& d) {
  switch (d.kind) {
    case DescriptorKind::EmptyValue: return "()";
    case DescriptorKind::AtomValue: return d.atom;
    case DescriptorKind::LocalNodePath:
      return d.node + ":" + path_to_string(d.path);
    case DescriptorKind::LocalNode: return d.node;
    case DescriptorKind::LocalPath: return path_to_string(d.path);
    case DescriptorKind::GlobalNodePath:
      return "\"" + d.node + ":" + path_to_string(d.path) + "\"";
    case DescriptorKind::GlobalNode: return "\"" + d.node + "\"";
    case DescriptorKind::GlobalPath: return "\"" + path_to_string(d.path) + "\"";
  }
  return "?";
}

// Fully spelled form, one sentence per line; reparsing yields an equal theory.
inline std::string print_theory(const Theory& theory) {
  std::ostringstream out;
  for (const auto& s : theory.sentences()) {
    out << s.node << ":" << path_to_string(s.lhs_path) << " ==";
    for (const auto& d : s.rhs) out << ' ' << descriptor_to_string(d);
    out << " .\n";
  }
  return out.str();
}

}  // namespace datr
