#pragma once
// Small synthetic instances for exhaustive checks.
#include <cmath>
#include <cstdint>
#include <vector>

#include "bgt/model.hpp"
#include "bgt/rng.hpp"

namespace bgt::testing {

// p candidates, M positive tests, planted set {0..k-1}. Every test gets one
// planted member that covers it, and every (candidate, test) pair is added
// independently on top of that, with probability dens for non-planted
// candidates and dens_planted (default: dens) for planted ones.
inline PrunedInstance planted_instance(std::size_t p, std::size_t k, std::size_t M, double dens,
                                       std::uint64_t seed, double dens_planted = -1.0) {
  if (dens_planted < 0.0) dens_planted = dens;
  CounterRng rng(seed, CounterRng::kAux + 7);
  std::vector<Bitset> cov(p, Bitset(M));
  for (std::size_t m = 0; m < M; ++m) {
    cov[rng.below(k)].set(m);
    for (std::size_t i = 0; i < p; ++i) {
      if (rng.bernoulli(i < k ? dens_planted : dens)) cov[i].set(m);
    }
  }
  std::vector<std::uint32_t> planted(k);
  for (std::size_t i = 0; i < k; ++i) planted[i] = static_cast<std::uint32_t>(i);
  return PrunedInstance::from_coverage(M, std::move(cov), planted);
}

// Uncovered count by a plain per-test loop over the coverage rows.
inline std::size_t naive_uncovered(const PrunedInstance& pr, const std::vector<std::uint32_t>& s) {
  std::size_t u = 0;
  for (std::size_t m = 0; m < pr.M(); ++m) {
    bool hit = false;
    for (auto i : s) hit = hit || pr.coverage(i).test(m);
    if (!hit) ++u;
  }
  return u;
}

// Concentration windows for the number of positive tests M and of possible
// infected p at exponent eta.
inline bool m_in_window(std::size_t M, std::uint64_t N, double eta) {
  const double w = std::pow(static_cast<double>(N), -eta);
  const double m = static_cast<double>(M);
  const double half = static_cast<double>(N) / 2.0;
  return (1.0 - w) * half <= m && m <= (1.0 + w) * half;
}

inline bool p_in_window(std::size_t p, std::uint64_t n, std::uint64_t k, double C, double eta) {
  const double w = std::pow(static_cast<double>(k), -eta);
  const double nd = static_cast<double>(n);
  const double ratio = static_cast<double>(k) / nd;
  const double lo = (1.0 - w) * nd * std::pow(ratio, C / 2.0 * (1.0 + w));
  const double hi = (1.0 + w) * nd * std::pow(ratio, C / 2.0 * (1.0 - w));
  const double pd = static_cast<double>(p);
  return lo <= pd && pd <= hi;
}

}  // namespace bgt::testing
