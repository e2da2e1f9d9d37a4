#include "atm/record.hpp"

#include <cctype>

namespace atm {

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

namespace {

void add_whitespace_tokens(const std::string& text, KeywordSet& out) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    if (end > pos) out.insert(to_lower_ascii(std::string_view(text).substr(pos, end - pos)));
    pos = end;
  }
}

}  // namespace

KeywordSet extract_keywords(const RawRecord& raw, ExtractionPolicy policy) {
  KeywordSet keywords;
  for (const auto& tag : raw.tags) {
    // A tag is one keyword; blank tags carry no structure.
    if (tag.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    keywords.insert(to_lower_ascii(tag));
  }
  if (policy == ExtractionPolicy::TagsPlusTextTokens) {
    for (const auto& [name, value] : raw.fields) {
      if (const auto* text = std::get_if<std::string>(&value)) add_whitespace_tokens(*text, keywords);
    }
  }
  return keywords;
}

Record RecordRegistrar::register_record(const RawRecord& raw) { return register_record(raw, policy_); }

Record RecordRegistrar::register_record(const RawRecord& raw, ExtractionPolicy policy) {
  if (raw.id.empty()) throw RegistrationError("malformed record: empty id");
  Record record;
  record.id = raw.id;
  for (const auto& [name, value] : raw.fields) {
    if (name.empty()) throw RegistrationError("malformed record '" + raw.id + "': empty field name");
    if (!record.fields.emplace(name, value).second) {
      throw RegistrationError("malformed record '" + raw.id + "': duplicate field '" + name + "'");
    }
  }
  record.keywords = extract_keywords(raw, policy);
  if (record.keywords.empty()) throw RegistrationError("empty keyword set for record '" + raw.id + "'");
  if (ids_.contains(raw.id)) throw RegistrationError("duplicate id '" + raw.id + "'");
  ids_.insert(raw.id);
  return record;
}

std::size_t serialized_size(const Record& record) {
  std::size_t size = 16;
  for (const auto& [name, value] : record.fields) {
    if (const auto* text = std::get_if<std::string>(&value)) {
      size += text->size();
    } else {
      size += 8;
    }
  }
  for (const auto& kw : record.keywords) size += kw.size() + 1;
  return size;
}

}  // namespace atm
