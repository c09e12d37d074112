#pragma once

// Depth-first enumeration of r-subsets of bitset rows with incremental unions.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "bgt/bitset.hpp"

namespace bgt {

/// Calls f(union_words, chosen) for every r-subset of rows in lexicographic
/// order, where union_words = base | rows[chosen...]. Each level ORs one row,
/// so a subset costs O(words) rather than O(r * words).
template <class F>
void for_each_union(const std::vector<const Bitset*>& rows, std::size_t r,
                    std::span<const std::uint64_t> base, F&& f) {
  const std::size_t n = rows.size();
  const std::size_t W = base.size();
  if (r > n) return;
  std::vector<std::uint64_t> stack((r + 1) * W);
  std::copy(base.begin(), base.end(), stack.begin());
  std::vector<std::uint32_t> idx(r);
  if (r == 0) {
    f(std::span<const std::uint64_t>(stack.data(), W), std::span<const std::uint32_t>(idx));
    return;
  }
  auto rec = [&](auto&& self, std::size_t d, std::size_t start) -> void {
    const std::uint64_t* prev = stack.data() + d * W;
    std::uint64_t* cur = stack.data() + (d + 1) * W;
    for (std::size_t i = start; i + (r - d) <= n; ++i) {
      idx[d] = static_cast<std::uint32_t>(i);
      const auto w = rows[i]->words();
      for (std::size_t x = 0; x < W; ++x) cur[x] = prev[x] | w[x];
      if (d + 1 == r) {
        f(std::span<const std::uint64_t>(cur, W), std::span<const std::uint32_t>(idx));
      } else {
        self(self, d + 1, i + 1);
      }
    }
  };
  rec(rec, 0, 0);
}

inline std::size_t popcount_words(std::span<const std::uint64_t> w) {
  std::size_t c = 0;
  for (auto x : w) c += static_cast<std::size_t>(std::popcount(x));
  return c;
}

}  // namespace bgt
