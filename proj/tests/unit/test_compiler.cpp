#include <gtest/gtest.h>

#include <functional>

#include "atm/codec.hpp"
#include "atm/request.hpp"
#include "support/fixtures.hpp"

namespace atm {
namespace {

RequestAst parse_one(const std::string& text) {
  auto r = parse_program(text);
  EXPECT_TRUE(r.ok()) << text;
  return r.requests.at(0);
}

TEST(CompileTest, CountWithoutArguments) {
  RequestCompiler compiler;
  Request r = compiler.compile(parse_one("MATCH ANY(temp) APPLY count;"));
  EXPECT_EQ(r.block, BlockKind::Count);
  EXPECT_EQ(r.id, 1u);
}

TEST(CompileTest, SumRequiresField) {
  RequestCompiler compiler;
  try {
    compiler.compile(parse_one("MATCH ANY(temp) APPLY sum;"));
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_STREQ(e.what(), "sum requires field argument");
    EXPECT_EQ(e.span().column, 23u);
  }
  EXPECT_THROW(compiler.compile(parse_one("MATCH ANY(temp) APPLY sum(3);")), CompileError);
  EXPECT_THROW(compiler.compile(parse_one("MATCH ANY(temp) APPLY count(value);")), CompileError);
}

TEST(CompileTest, ScaleSignature) {
  RequestCompiler compiler;
  Request r = compiler.compile(parse_one("MATCH ANY(temp) APPLY scale(value, 2);"));
  ASSERT_EQ(r.args.size(), 2u);
  EXPECT_EQ(std::get<FieldRef>(r.args[0]).name, "value");
  EXPECT_EQ(std::get<FieldValue>(r.args[1]), FieldValue{std::int64_t{2}});
  EXPECT_EQ(*r.field(), "value");
  EXPECT_THROW(compiler.compile(parse_one("MATCH ANY(t) APPLY scale(value, \"x\");")), CompileError);
  EXPECT_THROW(compiler.compile(parse_one("MATCH ANY(t) APPLY scale(value);")), CompileError);
}

TEST(CompileTest, UnknownOperation) {
  RequestCompiler compiler;
  try {
    compiler.compile(parse_one("MATCH ANY(t) APPLY median(value);"));
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown operation"), std::string::npos);
  }
}

TEST(CompileTest, KeywordsLowercasedAndIdsIncrease) {
  RequestCompiler compiler;
  Request a = compiler.compile(parse_one("MATCH ANY(Temp, TEMP, Sensor) APPLY count;"));
  Request b = compiler.compile(parse_one("MATCH ALL(x) APPLY search;"));
  EXPECT_EQ(a.keywords, (std::vector<std::string>{"temp", "sensor"}));
  EXPECT_LT(a.id, b.id);
  EXPECT_EQ(compiler.next_id(), 3u);
}

// The wire encoding names goals only: no DPU, record or placement vocabulary.
TEST(CompileTest, WireEncodingHasNoLocationVocabulary) {
  RequestCompiler compiler;
  Request r = compiler.compile(parse_one("MATCH ALL(a, b) WHERE v >= 2.5 AND c == \"x\" APPLY scale(v, 2);"));
  Json json = request_wire(r);
  std::string wire = json.dump();
  std::vector<std::string> keys;
  std::function<void(const Json&)> collect = [&](const Json& j) {
    if (j.is_object()) {
      for (const auto& [key, value] : j.items()) {
        keys.push_back(key);
        collect(value);
      }
    } else if (j.is_array()) {
      for (const auto& v : j) collect(v);
    }
  };
  collect(json);
  for (const char* word : {"dpu", "coord", "record", "placement", "location", "node", "position", "address"}) {
    for (const auto& key : keys) EXPECT_EQ(key.find(word), std::string::npos) << key;
  }
  EXPECT_NE(wire.find("\"op\":\"scale\""), std::string::npos);
}

}  // namespace
}  // namespace atm
