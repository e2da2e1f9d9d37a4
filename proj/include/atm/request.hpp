#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "atm/blocks.hpp"
#include "atm/value.hpp"

namespace atm {

struct SourceSpan {
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::size_t offset = 0;
  std::size_t length = 0;
};

enum class TokenKind {
  Ident,
  Integer,
  Real,
  String,
  Comparator,
  LParen,
  RParen,
  Comma,
  Semicolon,
  Match,
  Any,
  All,
  Where,
  And,
  Apply,
  End,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::End;
  std::string lexeme;
  FieldValue value;  // literals only
  SourceSpan span;
};

struct ParseError {
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::string message;
  std::string lexeme;

  /// "line:column: message"
  std::string str() const;
};

struct LexResult {
  std::vector<Token> tokens;  // always ends with End on success
  std::optional<ParseError> error;

  bool ok() const { return !error; }
};

LexResult tokenize(std::string_view text);

enum class MatchMode { Any, All };

struct KeywordNode {
  std::string text;
  SourceSpan span;
};

struct ConditionNode {
  std::string field;
  Comparator cmp = Comparator::Eq;
  FieldValue literal;
  SourceSpan span;
};

struct FieldRef {
  std::string name;
  bool operator==(const FieldRef&) const = default;
};

using ArgValue = std::variant<FieldRef, FieldValue>;

struct ArgNode {
  ArgValue value;
  SourceSpan span;
};

struct RequestAst {
  MatchMode mode = MatchMode::Any;
  std::vector<KeywordNode> keywords;
  std::vector<ConditionNode> conditions;
  std::string op;
  SourceSpan op_span;
  std::vector<ArgNode> args;
  SourceSpan span;
};

/// Equality ignoring source spans.
bool structurally_equal(const RequestAst& a, const RequestAst& b);

/// Canonical source text that reparses to a structurally equal AST.
std::string pretty_print(const RequestAst& ast);
std::string pretty_print(const std::vector<RequestAst>& program);

struct ParseResult {
  std::vector<RequestAst> requests;
  std::optional<ParseError> error;

  bool ok() const { return !error; }
};

ParseResult parse_program(std::string_view text);

struct Condition {
  std::string field;
  Comparator cmp = Comparator::Eq;
  FieldValue literal;

  bool operator==(const Condition&) const = default;
};

/// A compiled, validated goal. Carries no placement information.
struct Request {
  std::uint64_t id = 0;
  MatchMode mode = MatchMode::Any;
  std::vector<std::string> keywords;  // lowercase, unique, in source order
  std::vector<Condition> conditions;
  BlockKind block = BlockKind::Count;
  std::string op;
  std::vector<ArgValue> args;
  std::string source_text;  // canonical form

  /// Field argument of sum/min/max/avg/scale.
  const std::string* field() const;
  /// Numeric factor of scale.
  const FieldValue* factor() const;
};

class CompileError : public std::runtime_error {
 public:
  CompileError(const std::string& message, SourceSpan span)
      : std::runtime_error(message), span_(span) {}

  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

/// Resolves operations against a block registry and assigns request ids.
/// Ids strictly increase per compiler instance.
class RequestCompiler {
 public:
  explicit RequestCompiler(const BlockRegistry& registry = BlockRegistry::standard())
      : registry_(&registry) {}

  Request compile(const RequestAst& ast);

  std::uint64_t next_id() const { return next_id_; }

 private:
  const BlockRegistry* registry_;
  std::uint64_t next_id_ = 1;
};

bool is_identifier(std::string_view text);
bool is_reserved_word(std::string_view text);

}  // namespace atm
