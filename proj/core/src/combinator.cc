#include "combevo/combinator.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace combevo {

int ChooseArity(Rng& rng, int max_arity) {
  if (max_arity < kMinArity) {
    throw std::invalid_argument("max_arity must be >= 2, got " + std::to_string(max_arity));
  }
  return static_cast<int>(rng.Between(kMinArity, static_cast<std::uint64_t>(max_arity)));
}

void Chain(std::vector<TokenId>& acc, std::span<const TokenId> guest) {
  acc.insert(acc.end(), guest.begin(), guest.end());
}

void Nest(std::vector<TokenId>& acc, std::span<const TokenId> guest, std::size_t which,
          TokenId placeholder) {
  std::size_t seen = 0;
  for (auto it = acc.begin(); it != acc.end(); ++it) {
    if (*it != placeholder) continue;
    if (seen++ != which) continue;
    const auto at = acc.erase(it);
    acc.insert(at, guest.begin(), guest.end());
    return;
  }
  throw std::out_of_range("Nest: placeholder ordinal " + std::to_string(which) +
                          " out of range (" + std::to_string(seen) + " present)");
}

void NestRandom(std::vector<TokenId>& acc, std::span<const TokenId> guest, TokenId placeholder,
                Rng& rng) {
  const auto holes = static_cast<std::size_t>(std::count(acc.begin(), acc.end(), placeholder));
  if (holes == 0) throw std::out_of_range("NestRandom: no placeholder in accumulator");
  Nest(acc, guest, rng.Below(holes), placeholder);
}

void Combine(std::span<const std::span<const TokenId>> parts, const CombineOptions& options,
             Rng& rng, std::vector<TokenId>& out, CombineTrace* trace) {
  if (parts.size() < static_cast<std::size_t>(kMinArity)) {
    throw std::invalid_argument("Combine needs at least two blocks");
  }
  out.assign(parts.front().begin(), parts.front().end());
  auto holes = static_cast<std::size_t>(std::count(out.begin(), out.end(), options.placeholder));
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::span<const TokenId> guest = parts[i];
    const bool wants_nest = rng.Bernoulli(options.nest_probability);
    const auto guest_holes =
        static_cast<std::size_t>(std::count(guest.begin(), guest.end(), options.placeholder));
    if (wants_nest && holes > 0) {
      Nest(out, guest, rng.Below(holes), options.placeholder);
      holes = holes - 1 + guest_holes;
      if (trace != nullptr) ++trace->nests;
    } else {
      Chain(out, guest);
      holes += guest_holes;
      if (trace != nullptr) ++trace->chains;
    }
  }
}

std::vector<TokenId> Combine(std::span<const std::vector<TokenId>> parts,
                             const CombineOptions& options, Rng& rng, CombineTrace* trace) {
  std::vector<std::span<const TokenId>> views(parts.begin(), parts.end());
  std::vector<TokenId> out;
  Combine(views, options, rng, out, trace);
  return out;
}

}  // namespace combevo
