#include <cctype>
#include <charconv>
#include <string>

#include "atm/request.hpp"

namespace atm {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Integer: return "integer";
    case TokenKind::Real: return "real";
    case TokenKind::String: return "string";
    case TokenKind::Comparator: return "comparator";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Match: return "MATCH";
    case TokenKind::Any: return "ANY";
    case TokenKind::All: return "ALL";
    case TokenKind::Where: return "WHERE";
    case TokenKind::And: return "AND";
    case TokenKind::Apply: return "APPLY";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

std::string ParseError::str() const {
  return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

namespace {

bool ident_start(char ch) { return std::isalpha(static_cast<unsigned char>(ch)) || ch == '_'; }
bool ident_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; }
bool digit(char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; }

std::optional<TokenKind> reserved(std::string_view word) {
  if (word == "MATCH") return TokenKind::Match;
  if (word == "ANY") return TokenKind::Any;
  if (word == "ALL") return TokenKind::All;
  if (word == "WHERE") return TokenKind::Where;
  if (word == "AND") return TokenKind::And;
  if (word == "APPLY") return TokenKind::Apply;
  return std::nullopt;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  LexResult run() {
    LexResult result;
    while (true) {
      skip_blank();
      if (at_end()) break;
      Token token;
      if (!next(token)) {
        result.error = error_;
        return result;
      }
      result.tokens.push_back(std::move(token));
    }
    Token end;
    end.kind = TokenKind::End;
    end.span = here(0);
    result.tokens.push_back(end);
    return result;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  SourceSpan here(std::size_t length) const { return {line_, column_, pos_, length}; }

  void skip_blank() {
    while (!at_end()) {
      char ch = peek();
      if (ch == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else {
        return;
      }
    }
  }

  bool fail(const SourceSpan& at, std::string message, std::string lexeme) {
    error_ = ParseError{at.line, at.column, std::move(message), std::move(lexeme)};
    return false;
  }

  bool next(Token& token) {
    const SourceSpan start = here(0);
    const std::size_t begin = pos_;
    char ch = peek();

    auto finish = [&](TokenKind kind) {
      token.kind = kind;
      token.lexeme = std::string(text_.substr(begin, pos_ - begin));
      token.span = start;
      token.span.length = pos_ - begin;
      return true;
    };

    if (ident_start(ch)) {
      while (!at_end() && ident_char(peek())) advance();
      auto word = text_.substr(begin, pos_ - begin);
      return finish(reserved(word).value_or(TokenKind::Ident));
    }
    if (digit(ch) || (ch == '-' && digit(peek(1)))) return number(token, start, begin);
    if (ch == '"') return string(token, start, begin);

    switch (ch) {
      case '(': advance(); return finish(TokenKind::LParen);
      case ')': advance(); return finish(TokenKind::RParen);
      case ',': advance(); return finish(TokenKind::Comma);
      case ';': advance(); return finish(TokenKind::Semicolon);
      case '<':
      case '>':
        advance();
        if (peek() == '=') advance();
        return finish(TokenKind::Comparator);
      case '=':
      case '!':
        advance();
        if (peek() == '=') {
          advance();
          return finish(TokenKind::Comparator);
        }
        return fail(start, std::string("unknown comparator '") + ch + "'", std::string(1, ch));
      default: break;
    }
    // Report the whole UTF-8 sequence of an illegal character.
    std::size_t len = 1;
    auto lead = static_cast<unsigned char>(ch);
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    std::string lexeme(text_.substr(begin, len));
    return fail(start, "illegal character '" + lexeme + "'", lexeme);
  }

  bool number(Token& token, const SourceSpan& start, std::size_t begin) {
    if (peek() == '-') advance();
    while (digit(peek())) advance();
    bool real = false;
    if (peek() == '.' && digit(peek(1))) {
      real = true;
      advance();
      while (digit(peek())) advance();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
      real = true;
      advance();
      if (peek() == '+' || peek() == '-') advance();
      while (digit(peek())) advance();
    }
    std::string lexeme(text_.substr(begin, pos_ - begin));
    token.lexeme = lexeme;
    token.span = start;
    token.span.length = lexeme.size();
    const char* first = lexeme.data();
    const char* last = lexeme.data() + lexeme.size();
    if (real) {
      double value = 0;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc{} || ptr != last) return fail(start, "real literal out of range", lexeme);
      token.kind = TokenKind::Real;
      token.value = value;
    } else {
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc{} || ptr != last) return fail(start, "integer literal out of range", lexeme);
      token.kind = TokenKind::Integer;
      token.value = value;
    }
    if (ident_start(peek())) {
      return fail(here(1), std::string("illegal character '") + peek() + "' after number", std::string(1, peek()));
    }
    return true;
  }

  bool string(Token& token, const SourceSpan& start, std::size_t begin) {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (at_end() || peek() == '\n') {
        return fail(start, "unterminated string", std::string(text_.substr(begin, pos_ - begin)));
      }
      char ch = peek();
      if (ch == '"') {
        advance();
        break;
      }
      if (ch == '\\') {
        const SourceSpan esc = here(2);
        advance();
        if (at_end() || peek() == '\n') {
          return fail(start, "unterminated string", std::string(text_.substr(begin, pos_ - begin)));
        }
        char e = peek();
        switch (e) {
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default: return fail(esc, std::string("unknown escape '\\") + e + "'", std::string("\\") + e);
        }
        advance();
        continue;
      }
      value += ch;
      advance();
    }
    token.kind = TokenKind::String;
    token.lexeme = std::string(text_.substr(begin, pos_ - begin));
    token.value = std::move(value);
    token.span = start;
    token.span.length = pos_ - begin;
    return true;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t column_ = 1;
  ParseError error_;
};

}  // namespace

LexResult tokenize(std::string_view text) { return Lexer(text).run(); }

bool is_identifier(std::string_view text) {
  if (text.empty() || !ident_start(text.front())) return false;
  for (char ch : text) {
    if (!ident_char(ch)) return false;
  }
  return true;
}

bool is_reserved_word(std::string_view text) { return reserved(text).has_value(); }

}  // namespace atm
