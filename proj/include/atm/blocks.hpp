#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace atm {

enum class BlockKind { Search, Count, Sum, Min, Max, Avg, Scale };

enum class ArgKind { Field, Number };

/// A keyword-addressable operation a DPU can apply to its view.
struct FunctionalBlock {
  std::string keyword;
  std::vector<ArgKind> signature;
  BlockKind kind;

  bool mutates_store() const { return kind == BlockKind::Scale; }
};

/// Fixed at startup. Lookup is by operation keyword.
class BlockRegistry {
 public:
  explicit BlockRegistry(std::vector<FunctionalBlock> blocks);

  /// search, count, sum, min, max, avg, scale.
  static const BlockRegistry& standard();

  const FunctionalBlock* find(std::string_view keyword) const;
  const FunctionalBlock& get(BlockKind kind) const;
  const std::vector<FunctionalBlock>& blocks() const { return blocks_; }

 private:
  std::vector<FunctionalBlock> blocks_;
};

std::string_view to_string(BlockKind kind);

}  // namespace atm
