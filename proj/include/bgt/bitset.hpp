#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bgt {

/// Fixed-length, word-packed bitset. Bit i lives in word i/64, position i%64.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  std::size_t size() const noexcept { return nbits_; }
  std::size_t num_words() const noexcept { return words_.size(); }

  void set(std::size_t i) noexcept { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool none() const noexcept {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }

  Bitset& operator|=(const Bitset& o) noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  /// Indices of set bits, ascending.
  std::vector<std::uint32_t> indices() const {
    std::vector<std::uint32_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t x = words_[w];
      while (x) {
        out.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(x)));
        x &= x - 1;
      }
    }
    return out;
  }

  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

/// popcount(a | b) without materialising the union.
inline std::size_t union_count(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += static_cast<std::size_t>(std::popcount(a[i] | b[i]));
  return c;
}

}  // namespace bgt
