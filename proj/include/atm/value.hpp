#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace atm {

/// A record field value. Values of different kinds never compare equal and
/// never coerce into each other.
using FieldValue = std::variant<std::int64_t, double, std::string>;

enum class ValueKind { Integer, Real, Text };

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };

inline ValueKind kind_of(const FieldValue& v) {
  return static_cast<ValueKind>(v.index());
}

inline bool is_numeric(const FieldValue& v) { return kind_of(v) != ValueKind::Text; }

/// Numeric view of an integer or real value.
inline std::optional<double> as_real(const FieldValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

std::string_view to_string(Comparator c);
std::optional<Comparator> parse_comparator(std::string_view text);
bool is_ordered(Comparator c);

/// Evaluates `lhs cmp rhs`. Returns nullopt when the kinds differ.
std::optional<bool> compare(const FieldValue& lhs, Comparator cmp, const FieldValue& rhs);

/// Literal rendering used by the pretty printer and reports.
std::string render_literal(const FieldValue& v);

/// Exact running total of integers. Never wraps.
class IntegerSum {
 public:
  void add(std::int64_t v) { acc_ += v; }
  /// The total when it fits in 64 bits.
  std::optional<std::int64_t> exact() const {
    if (acc_ < INT64_MIN || acc_ > INT64_MAX) return std::nullopt;
    return static_cast<std::int64_t>(acc_);
  }
  double approx() const { return static_cast<double>(acc_); }

 private:
  __int128 acc_ = 0;
};

/// a * b, or nullopt when the product leaves the 64-bit range.
inline std::optional<std::int64_t> checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) return std::nullopt;
  return out;
}

}  // namespace atm
