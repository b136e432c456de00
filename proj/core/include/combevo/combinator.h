#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "combevo/alphabet.h"
#include "combevo/rng.h"

namespace combevo {

inline constexpr int kMinArity = 2;
inline constexpr int kDefaultMaxArity = 8;
inline constexpr double kDefaultNestProbability = 0.5;

// Uniform on {2, ..., max_arity}. Throws std::invalid_argument if
// max_arity < 2.
int ChooseArity(Rng& rng, int max_arity);

// acc ++ guest.
void Chain(std::vector<TokenId>& acc, std::span<const TokenId> guest);

// Replaces the `which`-th (0-based) placeholder token of acc with the full
// guest sequence. Placeholders carried by the guest survive. Throws
// std::out_of_range if acc has fewer than which + 1 placeholders.
void Nest(std::vector<TokenId>& acc, std::span<const TokenId> guest, std::size_t which,
          TokenId placeholder);

// Draws the placeholder ordinal uniformly, then nests. Throws
// std::out_of_range when acc has no placeholder; callers fall back to Chain.
void NestRandom(std::vector<TokenId>& acc, std::span<const TokenId> guest, TokenId placeholder,
                Rng& rng);

struct CombineOptions {
  TokenId placeholder{};
  double nest_probability = kDefaultNestProbability;
};

struct CombineTrace {
  std::size_t nests = 0;
  std::size_t chains = 0;
};

// Left fold over parts: the first part is the host; for every following
// guest one Bernoulli(nest_probability) decision is drawn, and if it says
// nest and the accumulator holds a placeholder, a uniformly chosen
// placeholder is replaced by the guest. Otherwise the guest is chained.
//
// `out` is cleared and receives the result. Requires parts.size() >= 2 and
// non-empty parts.
void Combine(std::span<const std::span<const TokenId>> parts, const CombineOptions& options,
             Rng& rng, std::vector<TokenId>& out, CombineTrace* trace = nullptr);

std::vector<TokenId> Combine(std::span<const std::vector<TokenId>> parts,
                             const CombineOptions& options, Rng& rng,
                             CombineTrace* trace = nullptr);

}  // namespace combevo
