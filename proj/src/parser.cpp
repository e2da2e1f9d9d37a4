#include <string>

#include "atm/request.hpp"

namespace atm {

namespace {

/// Recursive descent over the token stream; stops at the first error.
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ParseResult run() {
    ParseResult result;
    while (current().kind != TokenKind::End) {
      RequestAst ast;
      if (!request(ast)) {
        result.requests.clear();
        result.error = error_;
        return result;
      }
      result.requests.push_back(std::move(ast));
    }
    return result;
  }

 private:
  const Token& current() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  bool fail(const Token& at, std::string message) {
    error_ = ParseError{at.span.line, at.span.column, std::move(message), at.lexeme};
    return false;
  }

  bool expect(TokenKind kind, std::string_view context) {
    if (current().kind == kind) {
      take();
      return true;
    }
    return fail(current(), "expected " + std::string(to_string(kind)) + " " + std::string(context) +
                               ", found " + describe(current()));
  }

  static std::string describe(const Token& token) {
    if (token.kind == TokenKind::End) return "end of input";
    return "'" + token.lexeme + "'";
  }

  bool request(RequestAst& ast) {
    const Token& head = current();
    ast.span = head.span;
    if (!expect(TokenKind::Match, "at start of request")) return false;

    if (current().kind == TokenKind::Any) {
      ast.mode = MatchMode::Any;
    } else if (current().kind == TokenKind::All) {
      ast.mode = MatchMode::All;
    } else {
      return fail(current(), "expected ANY or ALL after MATCH, found " + describe(current()));
    }
    take();

    if (!expect(TokenKind::LParen, "after match mode")) return false;
    if (!keyword(ast)) return false;
    while (current().kind == TokenKind::Comma) {
      take();
      if (!keyword(ast)) return false;
    }
    if (!expect(TokenKind::RParen, "after match keywords")) return false;

    if (current().kind == TokenKind::Where) {
      take();
      if (!condition(ast)) return false;
      while (current().kind == TokenKind::And) {
        take();
        if (!condition(ast)) return false;
      }
    }

    if (!expect(TokenKind::Apply, "before operation")) return false;
    if (current().kind != TokenKind::Ident) {
      return fail(current(), "expected operation keyword after APPLY, found " + describe(current()));
    }
    ast.op = current().lexeme;
    ast.op_span = current().span;
    take();

    if (current().kind == TokenKind::LParen) {
      take();
      if (!argument(ast)) return false;
      while (current().kind == TokenKind::Comma) {
        take();
        if (!argument(ast)) return false;
      }
      if (!expect(TokenKind::RParen, "after arguments")) return false;
    }

    const Token& end = current();
    if (!expect(TokenKind::Semicolon, "at end of request")) return false;
    ast.span.length = end.span.offset + end.span.length - ast.span.offset;
    return true;
  }

  bool keyword(RequestAst& ast) {
    const Token& token = current();
    if (token.kind == TokenKind::Ident) {
      ast.keywords.push_back({token.lexeme, token.span});
    } else if (token.kind == TokenKind::String) {
      const auto& text = std::get<std::string>(token.value);
      if (text.empty()) return fail(token, "empty keyword");
      ast.keywords.push_back({text, token.span});
    } else {
      return fail(token, "expected keyword, found " + describe(token));
    }
    take();
    return true;
  }

  static bool literal_kind(TokenKind kind) {
    return kind == TokenKind::Integer || kind == TokenKind::Real || kind == TokenKind::String;
  }

  bool condition(RequestAst& ast) {
    const Token& field = current();
    if (field.kind != TokenKind::Ident) {
      return fail(field, "expected field name in condition, found " + describe(field));
    }
    take();
    const Token& op = current();
    if (op.kind != TokenKind::Comparator) {
      return fail(op, "expected comparator after '" + field.lexeme + "', found " + describe(op));
    }
    auto cmp = parse_comparator(op.lexeme);
    if (!cmp) return fail(op, "unknown comparator '" + op.lexeme + "'");
    take();
    const Token& lit = current();
    if (!literal_kind(lit.kind)) {
      return fail(lit, "expected literal after comparator, found " + describe(lit));
    }
    if (lit.kind == TokenKind::String && is_ordered(*cmp)) {
      return fail(op, "ordered comparator on string literal");
    }
    take();
    ConditionNode node{field.lexeme, *cmp, lit.value, field.span};
    node.span.length = lit.span.offset + lit.span.length - field.span.offset;
    ast.conditions.push_back(std::move(node));
    return true;
  }

  bool argument(RequestAst& ast) {
    const Token& token = current();
    if (token.kind == TokenKind::Ident) {
      ast.args.push_back({FieldRef{token.lexeme}, token.span});
    } else if (literal_kind(token.kind)) {
      ast.args.push_back({token.value, token.span});
    } else {
      return fail(token, "expected argument, found " + describe(token));
    }
    take();
    return true;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseError error_;
};

std::string render_keyword(const std::string& text) {
  if (is_identifier(text) && !is_reserved_word(text)) return text;
  return render_literal(FieldValue{text});
}

}  // namespace

ParseResult parse_program(std::string_view text) {
  LexResult lexed = tokenize(text);
  if (!lexed.ok()) return ParseResult{{}, lexed.error};
  return Parser(std::move(lexed.tokens)).run();
}

bool structurally_equal(const RequestAst& a, const RequestAst& b) {
  if (a.mode != b.mode || a.op != b.op) return false;
  if (a.keywords.size() != b.keywords.size() || a.conditions.size() != b.conditions.size() ||
      a.args.size() != b.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.keywords.size(); ++i) {
    if (a.keywords[i].text != b.keywords[i].text) return false;
  }
  for (std::size_t i = 0; i < a.conditions.size(); ++i) {
    const auto& x = a.conditions[i];
    const auto& y = b.conditions[i];
    if (x.field != y.field || x.cmp != y.cmp || x.literal != y.literal) return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i].value != b.args[i].value) return false;
  }
  return true;
}

std::string pretty_print(const RequestAst& ast) {
  std::string out = "MATCH ";
  out += ast.mode == MatchMode::Any ? "ANY(" : "ALL(";
  for (std::size_t i = 0; i < ast.keywords.size(); ++i) {
    if (i) out += ", ";
    out += render_keyword(ast.keywords[i].text);
  }
  out += ')';
  for (std::size_t i = 0; i < ast.conditions.size(); ++i) {
    const auto& c = ast.conditions[i];
    out += i ? " AND " : " WHERE ";
    out += c.field;
    out += ' ';
    out += to_string(c.cmp);
    out += ' ';
    out += render_literal(c.literal);
  }
  out += " APPLY ";
  out += ast.op;
  if (!ast.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < ast.args.size(); ++i) {
      if (i) out += ", ";
      if (const auto* ref = std::get_if<FieldRef>(&ast.args[i].value)) {
        out += ref->name;
      } else {
        out += render_literal(std::get<FieldValue>(ast.args[i].value));
      }
    }
    out += ')';
  }
  out += ';';
  return out;
}

std::string pretty_print(const std::vector<RequestAst>& program) {
  std::string out;
  for (const auto& ast : program) {
    out += pretty_print(ast);
    out += '\n';
  }
  return out;
}

}  // namespace atm
