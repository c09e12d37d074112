#pragma once

// Random MAX k-set cover: sampling, exact and greedy Phi_k, and flatness.

#include <cstdint>
#include <string>
#include <vector>

#include "bgt/bitset.hpp"

namespace bgt {

struct CoverInstance {
  std::size_t universe_size = 0;  // P
  std::size_t num_sets = 0;       // M
  std::size_t k = 0;
  double q = 0.0;
  std::uint64_t seed = 0;
  std::vector<Bitset> sets;      // sets[m] over the universe
  std::vector<Bitset> elements;  // elements[i] = sets containing i, over [M]

  /// Build from explicit sets (each of length P); fills the transposed view.
  static CoverInstance from_sets(std::size_t P, std::size_t k, std::vector<Bitset> sets);
};

/// Each element joins each set independently with q = 1 - 2^{-1/k}.
CoverInstance sample_cover(std::size_t P, std::size_t M, std::size_t k, std::uint64_t seed);

struct CoverDims {
  std::size_t P;
  std::size_t M;
  std::size_t k;
};

/// (P, M, k) matching a group testing model: k = floor(n^alpha),
/// M = round(N/2), P = round(p_det) - k.
CoverDims cover_dims_from_model(std::uint64_t n, double alpha, double C);

struct CoverCaps {
  double subsets = 2e7;  // max C(P,k) for exact enumeration
  double flat_k = 20;    // max k for the all-subsets flatness check
};

struct CoverResult {
  double phi = 0.0;
  std::size_t covered = 0;
  std::vector<std::uint32_t> witness;  // sorted element indices
};

/// Exact max fraction of sets hit by some k-subset of the universe.
CoverResult phi_k_exact(const CoverInstance& inst, const CoverCaps& caps = {});

/// Greedy max coverage: k picks, each maximising newly hit sets (lowest index on ties).
CoverResult phi_k_greedy(const CoverInstance& inst);

/// Mean covered fraction over `trials` uniform k-subsets.
double phi_k_random_mean(const CoverInstance& inst, std::size_t trials, std::uint64_t seed);

/// 1 - h2^{-1}(2 - 2/C) for C in (1, 2].
double phi_k_limit(double C);

struct SubsetProps {
  double p_l;
  double y_l;
};

/// p_l = 2^{1-l/k} - 1 and y_l = y + p_l (1 - y).
SubsetProps subset_props(std::size_t k, std::size_t l, double y);

/// D_l = sqrt(6 p_l (1-p_l) (1-y) M [log C(k,l) + (1+c) log k]).
double flat_radius(std::size_t k, std::size_t l, double y, double M, double c_dl);

/// Number of sets not hit by the given elements.
std::size_t uncovered_sets(const CoverInstance& inst, const std::vector<std::uint32_t>& elems);

/// Every sub-subset s of sigma (all 2^|sigma|) leaves a number of sets
/// uncovered within D_l of M y_l, l = |s|. y is the uncovered fraction.
bool is_flat(const CoverInstance& inst, const std::vector<std::uint32_t>& sigma, double y,
             double c_dl, const CoverCaps& caps = {});

struct FlatCount {
  std::size_t t = 0;          // round(y M), the target uncovered count
  double y_used = 0.0;        // t / M
  std::uint64_t Y = 0;        // flat k-subsets with exactly t uncovered
  std::uint64_t Z_exact = 0;  // k-subsets with exactly t uncovered
  std::uint64_t Z_at_most = 0;  // k-subsets with at most t uncovered
};

FlatCount count_flat(const CoverInstance& inst, double y, double c_dl, const CoverCaps& caps = {});

std::string cover_report_json(const CoverInstance& inst, const CoverResult& exact,
                              const CoverResult& greedy, double random_mean, double C);

}  // namespace bgt
