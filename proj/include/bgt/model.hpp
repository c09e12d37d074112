#pragma once

// Bernoulli group testing instances, COMP pruning and the covering energy.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bgt/bitset.hpp"

namespace bgt {

/// A sampled (alpha, C) Bernoulli group testing instance.
struct GTInstance {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double alpha = 0.0;
  double C = 0.0;
  double q = 0.0;
  std::uint64_t N = 0;
  std::vector<std::uint32_t> sigma_star;          // sorted, size k
  std::vector<std::vector<std::uint32_t>> tests;  // sorted member lists, size N
  std::vector<std::uint8_t> outcomes;             // 1 = positive
  std::uint64_t seed = 0;

  friend bool operator==(const GTInstance&, const GTInstance&) = default;
};

/// A k-subset of candidate-local indices, kept sorted.
class KSubset {
 public:
  KSubset() = default;
  /// Validates size == k, indices < p, no duplicates. Sorts.
  KSubset(std::vector<std::uint32_t> members, std::size_t p, std::size_t k);

  std::span<const std::uint32_t> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool contains(std::uint32_t i) const;

  friend bool operator==(const KSubset&, const KSubset&) = default;

 private:
  std::vector<std::uint32_t> members_;
};

/// COMP-reduced view: M positive tests over p candidates.
class PrunedInstance {
 public:
  PrunedInstance() = default;

  /// Build directly from per-candidate coverage rows (each of length M).
  /// Planted indices are candidate-local. Used for synthetic instances.
  static PrunedInstance from_coverage(std::size_t M, std::vector<Bitset> coverage,
                                      std::vector<std::uint32_t> sigma_star_local,
                                      std::vector<std::uint32_t> candidates = {});

  std::size_t M() const noexcept { return M_; }
  std::size_t p() const noexcept { return coverage_.size(); }
  std::size_t k() const noexcept { return sigma_star_local_.size(); }

  std::span<const std::uint32_t> candidates() const noexcept { return candidates_; }
  const Bitset& coverage(std::size_t i) const { return coverage_[i]; }
  std::span<const Bitset> coverage() const noexcept { return coverage_; }
  /// Positive tests of candidate i, ascending.
  std::span<const std::uint32_t> tests_of(std::size_t i) const { return adjacency_[i]; }
  std::span<const std::uint32_t> sigma_star_local() const noexcept { return sigma_star_local_; }
  bool is_planted(std::size_t i) const { return planted_[i] != 0; }

  KSubset planted_subset() const { return KSubset(sigma_star_local_, p(), k()); }

 private:
  friend PrunedInstance comp_prune(const GTInstance& inst);
  void finish();

  std::size_t M_ = 0;
  std::vector<std::uint32_t> candidates_;
  std::vector<Bitset> coverage_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::vector<std::uint32_t> sigma_star_local_;
  std::vector<std::uint8_t> planted_;
};

struct SampleOptions {
  /// Refuse to build an instance whose expected in-memory size exceeds this.
  std::uint64_t memory_budget_bytes = std::uint64_t{4} << 30;
};

/// q = 1 - 2^{-1/k}, so that (1-q)^k = 1/2.
double assignment_prob(std::uint64_t k);

/// N = floor(C log2 C(n, k)).
std::uint64_t num_tests(std::uint64_t n, std::uint64_t k, double C);

/// k = floor(n^alpha), guarded against pow() landing just below an integer.
std::uint64_t infected_count(std::uint64_t n, double alpha);

/// Sample an (alpha, C) instance with k = floor(n^alpha). Deterministic in seed.
GTInstance sample_instance(std::uint64_t n, double alpha, double C, std::uint64_t seed,
                           const SampleOptions& opts = {});

/// Same, with k given directly; alpha is recorded as log k / log n.
GTInstance sample_instance_k(std::uint64_t n, std::uint64_t k, double C, std::uint64_t seed,
                             const SampleOptions& opts = {});

/// Throws if outcomes are inconsistent with tests and sigma_star, or sizes are off.
void validate(const GTInstance& inst);

/// Discard every individual appearing in a negative test.
PrunedInstance comp_prune(const GTInstance& inst);

/// Number of positive tests not covered by sigma.
std::size_t uncovered_count(const PrunedInstance& pr, const KSubset& sigma);

/// H(sigma) = uncovered positive tests / M. Throws UndefinedEnergy when M = 0.
double hamiltonian(const PrunedInstance& pr, const KSubset& sigma);

/// |sigma ∩ sigma*|.
std::size_t overlap(const KSubset& sigma, const PrunedInstance& pr);

struct Scales {
  double M_det;
  double p_det;
};

/// M_det = N/2 and p_det = n (k/n)^{C/2} + k.
Scales deterministic_scales(std::uint64_t n, std::uint64_t k, double C);

// Serialization -----------------------------------------------------------

std::string to_json_string(const GTInstance& inst);
GTInstance instance_from_json_string(const std::string& text);

/// "BGT1", u64 LE header (n, k, N, seed), N bit-packed membership rows of
/// ceil(n/8) bytes (bit i of a row = individual i, LSB first), then a trailer
/// of k u64 planted indices and the f64 alpha and C.
void write_binary(std::ostream& os, const GTInstance& inst);
GTInstance read_binary(std::istream& is);

}  // namespace bgt
