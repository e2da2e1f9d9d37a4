#include <algorithm>

#include "atm/record.hpp"
#include "atm/request.hpp"

namespace atm {

const std::string* Request::field() const {
  if (args.empty()) return nullptr;
  if (const auto* ref = std::get_if<FieldRef>(&args.front())) return &ref->name;
  return nullptr;
}

const FieldValue* Request::factor() const {
  if (args.size() < 2) return nullptr;
  return std::get_if<FieldValue>(&args[1]);
}

namespace {

std::string signature_message(const FunctionalBlock& block) {
  switch (block.signature.size()) {
    case 0: return block.keyword + " takes no arguments";
    case 1: return block.keyword + " requires field argument";
    default: return block.keyword + " requires field and numeric factor arguments";
  }
}

bool arg_matches(const ArgValue& arg, ArgKind kind) {
  if (kind == ArgKind::Field) return std::holds_alternative<FieldRef>(arg);
  const auto* lit = std::get_if<FieldValue>(&arg);
  return lit && is_numeric(*lit);
}

}  // namespace

Request RequestCompiler::compile(const RequestAst& ast) {
  if (ast.keywords.empty()) throw CompileError("match keyword list is empty", ast.span);
  const FunctionalBlock* block = registry_->find(ast.op);
  if (!block) throw CompileError("unknown operation '" + ast.op + "'", ast.op_span);
  if (ast.args.size() != block->signature.size()) throw CompileError(signature_message(*block), ast.op_span);
  for (std::size_t i = 0; i < ast.args.size(); ++i) {
    if (!arg_matches(ast.args[i].value, block->signature[i])) {
      throw CompileError(signature_message(*block), ast.args[i].span);
    }
  }

  Request request;
  request.mode = ast.mode;
  for (const auto& kw : ast.keywords) {
    std::string lowered = to_lower_ascii(kw.text);
    if (std::find(request.keywords.begin(), request.keywords.end(), lowered) == request.keywords.end()) {
      request.keywords.push_back(std::move(lowered));
    }
  }
  for (const auto& c : ast.conditions) {
    if (kind_of(c.literal) == ValueKind::Text && is_ordered(c.cmp)) {
      throw CompileError("ordered comparator on string literal", c.span);
    }
    request.conditions.push_back({c.field, c.cmp, c.literal});
  }
  request.block = block->kind;
  request.op = block->keyword;
  for (const auto& arg : ast.args) request.args.push_back(arg.value);
  request.source_text = pretty_print(ast);
  request.id = next_id_++;
  return request;
}

}  // namespace atm
