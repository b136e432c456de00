#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "combevo/alphabet.h"
#include "combevo/code_block.h"
#include "combevo/rng.h"

namespace combevo {

// Append-only, deduplicated store of code blocks with weight-proportional
// sampling. Weights never change after insertion, so sampling keeps an
// append-only prefix-sum array and draws by binary search.
//
// Single writer: callers must not mutate while another thread reads.
class Repository {
 public:
  // Starts with SeedBlocks(alphabet).
  explicit Repository(Alphabet alphabet);

  // Builds a repository from explicit blocks, validating every invariant
  // (dense ids, dedup, seed/admitted shape, parent references). Used by
  // snapshot restore. Throws ValidationError.
  Repository(Alphabet alphabet, std::vector<CodeBlock> blocks);

  // Adds an extra generation-0 block (no parents) with the given value and
  // weight, e.g. to pre-load known structures. Only legal before the first
  // Insert. Returns nullopt on duplicates.
  std::optional<BlockId> AddSeed(std::vector<TokenId> tokens, std::uint32_t value,
                                 std::uint64_t weight);

  // Admits a combined block with weight = value. Returns nullopt (and
  // leaves the repository unchanged) if the token sequence is already
  // stored. Throws std::invalid_argument if value == 0, tokens are empty,
  // fewer than two parents are given, or a parent id is unknown.
  std::optional<BlockId> Insert(std::span<const TokenId> tokens, std::uint32_t value,
                                std::span<const BlockId> parents, std::uint64_t iteration);

  std::optional<BlockId> Find(std::span<const TokenId> tokens) const;
  bool Contains(std::span<const TokenId> tokens) const { return Find(tokens).has_value(); }

  // One draw with probability weight / total_weight. Throws std::logic_error
  // on an empty repository.
  BlockId SampleOne(Rng& rng) const;

  // k independent draws with replacement, appended to `out` after clearing.
  void Sample(Rng& rng, std::size_t k, std::vector<BlockId>& out) const;
  std::vector<BlockId> Sample(Rng& rng, std::size_t k) const;

  const Alphabet& alphabet() const { return alphabet_; }
  std::span<const CodeBlock> blocks() const { return blocks_; }
  const CodeBlock& block(BlockId id) const { return blocks_.at(id); }
  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }
  std::uint64_t total_weight() const { return total_weight_; }
  std::size_t seed_count() const { return seed_count_; }
  std::uint32_t max_value() const { return max_value_; }

  // Recomputes the weight sum from scratch; equals total_weight() unless
  // the object is corrupt.
  std::uint64_t RecomputeTotalWeight() const;

 private:
  static std::string Key(std::span<const TokenId> tokens);
  BlockId Append(CodeBlock block);

  Alphabet alphabet_;
  std::vector<CodeBlock> blocks_;
  std::vector<std::uint64_t> cumulative_;  // cumulative_[i] = sum of weights 0..i
  std::unordered_map<std::string, BlockId> index_;
  std::uint64_t total_weight_ = 0;
  std::size_t seed_count_ = 0;
  std::uint32_t max_value_ = 0;
};

// Where a run stands between iterations; stored alongside a snapshot so an
// interrupted run can continue on the same random stream.
struct RunCursor {
  std::uint64_t iteration = 0;  // iterations completed
  std::uint64_t rng_seed = 0;
  std::uint64_t rng_position = 0;
  std::uint64_t admitted = 0;
  std::uint64_t discarded = 0;

  friend bool operator==(const RunCursor&, const RunCursor&) = default;
};

struct Snapshot {
  Repository repository;
  std::optional<RunCursor> cursor;
};

// Writes a versioned line-delimited snapshot (format documented in
// docs/formats.md). The file is written to a temporary sibling and renamed
// into place. Throws IoError.
void WriteSnapshot(const Repository& repo, const std::filesystem::path& path,
                   const std::optional<RunCursor>& cursor = std::nullopt);

// Reads a snapshot. The alphabet is embedded in the file; if `expected` is
// given its hash must match. Throws IoError, CorruptFileError or
// ValidationError.
Snapshot ReadSnapshot(const std::filesystem::path& path, const Alphabet* expected = nullptr);

}  // namespace combevo
