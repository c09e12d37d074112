#pragma once

// Lexicographic k-subset enumeration and combinatorial-number-system ranking.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bgt/mathcore.hpp"

namespace bgt {

/// C(n, k) as a double (exact below 2^53).
inline double binom_count(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  return std::round(std::exp(log_binom(n, k)));
}

/// Exact C(n, k) for small arguments; saturates at UINT64_MAX.
inline std::uint64_t binom_exact(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(acc);
}

/// Advance idx (strictly increasing, values < n) to the next k-subset in
/// lexicographic order. Returns false after the last one.
inline bool next_combination(std::span<std::uint32_t> idx, std::uint32_t n) {
  const std::size_t k = idx.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::vector<std::uint32_t> first_combination(std::size_t k) {
  std::vector<std::uint32_t> v(k);
  for (std::size_t i = 0; i < k; ++i) v[i] = static_cast<std::uint32_t>(i);
  return v;
}

/// Call f(span) for every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_combination(std::uint32_t n, std::size_t k, F&& f) {
  if (k > n) return;
  auto idx = first_combination(k);
  do {
    f(std::span<const std::uint32_t>(idx));
  } while (next_combination(idx, n));
}

/// Colexicographic rank of a sorted k-subset: sum_i C(idx[i], i+1).
class CombinationRanker {
 public:
  CombinationRanker(std::uint32_t n, std::size_t k) : k_(k), table_((n + 1) * (k + 1), 0) {
    for (std::uint32_t m = 0; m <= n; ++m) {
      for (std::size_t j = 0; j <= k; ++j) table_[m * (k + 1) + j] = binom_exact(m, j);
    }
  }

  std::uint64_t rank(std::span<const std::uint32_t> sorted) const {
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) r += table_[sorted[i] * (k_ + 1) + (i + 1)];
    return r;
  }

 private:
  std::size_t k_;
  std::vector<std::uint64_t> table_;
};

}  // namespace bgt
