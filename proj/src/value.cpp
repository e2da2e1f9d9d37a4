#include "atm/value.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace atm {

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::Eq: return "==";
    case Comparator::Ne: return "!=";
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
  }
  return "?";
}

std::optional<Comparator> parse_comparator(std::string_view text) {
  if (text == "==") return Comparator::Eq;
  if (text == "!=") return Comparator::Ne;
  if (text == "<") return Comparator::Lt;
  if (text == "<=") return Comparator::Le;
  if (text == ">") return Comparator::Gt;
  if (text == ">=") return Comparator::Ge;
  return std::nullopt;
}

bool is_ordered(Comparator c) { return c != Comparator::Eq && c != Comparator::Ne; }

namespace {

template <typename T>
bool apply(const T& a, Comparator cmp, const T& b) {
  switch (cmp) {
    case Comparator::Eq: return a == b;
    case Comparator::Ne: return a != b;
    case Comparator::Lt: return a < b;
    case Comparator::Le: return a <= b;
    case Comparator::Gt: return a > b;
    case Comparator::Ge: return a >= b;
  }
  return false;
}

}  // namespace

std::optional<bool> compare(const FieldValue& lhs, Comparator cmp, const FieldValue& rhs) {
  if (lhs.index() != rhs.index()) return std::nullopt;
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        return apply(a, cmp, std::get<T>(rhs));
      },
      lhs);
}

std::string render_literal(const FieldValue& v) {
  switch (kind_of(v)) {
    case ValueKind::Integer: return std::to_string(std::get<std::int64_t>(v));
    case ValueKind::Real: {
      std::array<char, 64> buf{};
      auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::get<double>(v));
      if (ec != std::errc{}) throw std::runtime_error("cannot render real literal");
      std::string out(buf.data(), end);
      if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
      return out;
    }
    case ValueKind::Text: {
      std::string out = "\"";
      for (char ch : std::get<std::string>(v)) {
        switch (ch) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          default: out += ch;
        }
      }
      out += '"';
      return out;
    }
  }
  return {};
}

}  // namespace atm
