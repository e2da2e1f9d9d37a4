#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "atm/value.hpp"

namespace atm {

class RegistrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeywordSet = std::set<std::string>;
using Fields = std::map<std::string, FieldValue>;

/// A record as it arrives at the initiator port, before keyword extraction.
struct RawRecord {
  std::string id;
  std::vector<std::string> tags;
  std::vector<std::pair<std::string, FieldValue>> fields;
};

/// The elementary data portion. Keywords are frozen at registration; fields
/// may change through in-place transforms.
struct Record {
  std::string id;
  Fields fields;
  KeywordSet keywords;

  bool operator==(const Record&) const = default;
};

enum class ExtractionPolicy { ExplicitTags, TagsPlusTextTokens };

std::string to_lower_ascii(std::string_view text);

/// Keyword extraction without the uniqueness check.
KeywordSet extract_keywords(const RawRecord& raw, ExtractionPolicy policy);

/// Registers records for one fabric session and rejects duplicate ids.
class RecordRegistrar {
 public:
  explicit RecordRegistrar(ExtractionPolicy policy = ExtractionPolicy::ExplicitTags) : policy_(policy) {}

  Record register_record(const RawRecord& raw);
  Record register_record(const RawRecord& raw, ExtractionPolicy policy);

  ExtractionPolicy policy() const { return policy_; }
  std::size_t registered() const { return ids_.size(); }

 private:
  ExtractionPolicy policy_;
  std::unordered_set<std::string> ids_;
};

/// Byte model: 16 + 8 per numeric field + text bytes + (keyword bytes + 1) each.
std::size_t serialized_size(const Record& record);

}  // namespace atm
