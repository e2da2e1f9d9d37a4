#include "atm/blocks.hpp"

#include <stdexcept>

namespace atm {

BlockRegistry::BlockRegistry(std::vector<FunctionalBlock> blocks) : blocks_(std::move(blocks)) {}

const BlockRegistry& BlockRegistry::standard() {
  static const BlockRegistry registry({
      {"search", {}, BlockKind::Search},
      {"count", {}, BlockKind::Count},
      {"sum", {ArgKind::Field}, BlockKind::Sum},
      {"min", {ArgKind::Field}, BlockKind::Min},
      {"max", {ArgKind::Field}, BlockKind::Max},
      {"avg", {ArgKind::Field}, BlockKind::Avg},
      {"scale", {ArgKind::Field, ArgKind::Number}, BlockKind::Scale},
  });
  return registry;
}

const FunctionalBlock* BlockRegistry::find(std::string_view keyword) const {
  for (const auto& block : blocks_) {
    if (block.keyword == keyword) return &block;
  }
  return nullptr;
}

const FunctionalBlock& BlockRegistry::get(BlockKind kind) const {
  for (const auto& block : blocks_) {
    if (block.kind == kind) return block;
  }
  throw std::out_of_range("block kind not registered");
}

std::string_view to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::Search: return "search";
    case BlockKind::Count: return "count";
    case BlockKind::Sum: return "sum";
    case BlockKind::Min: return "min";
    case BlockKind::Max: return "max";
    case BlockKind::Avg: return "avg";
    case BlockKind::Scale: return "scale";
  }
  return "?";
}

}  // namespace atm
