#pragma once

#include <cstdint>
#include <vector>

#include "combevo/alphabet.h"

namespace combevo {

using BlockId = std::uint32_t;

// Unit of evolution. Seeds have value 0, no parents and generation 0;
// admitted blocks have value >= 1, at least two parents and
// generation = 1 + max(parent generation).
struct CodeBlock {
  BlockId id = 0;
  std::vector<TokenId> tokens;
  std::uint32_t value = 0;
  std::uint64_t weight = 0;
  std::vector<BlockId> parents;
  std::uint64_t discovered_at = 0;
  std::uint32_t generation = 0;

  bool is_seed() const { return parents.empty(); }

  friend bool operator==(const CodeBlock&, const CodeBlock&) = default;
};

// One single-token block per alphabet token, in alphabet order, each with
// selection weight base_weight and classification value 0.
std::vector<CodeBlock> SeedBlocks(const Alphabet& alphabet);

}  // namespace combevo
