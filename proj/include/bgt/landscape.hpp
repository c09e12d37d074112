#pragma once

// Exact desk-scale landscape: Z_{t,l} counts, the restricted minima phi(l),
// and bottleneck-OGP detection.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bgt/model.hpp"

namespace bgt {

struct LandscapeCaps {
  double stratum = 2e7;  // max C(k,l) C(p-k,k-l) per enumerated stratum
};

/// Uncovered-count histogram of the overlap-l stratum.
struct StratumHistogram {
  std::size_t l = 0;
  std::vector<std::uint64_t> counts;  // counts[u] = #subsets leaving u tests uncovered
  std::size_t min_uncovered = 0;
  std::optional<KSubset> witness;     // one subset attaining min_uncovered

  std::uint64_t total() const;
};

/// Size of the overlap-l stratum, C(k,l) C(p-k,k-l), as a double.
double stratum_size(const PrunedInstance& pr, std::size_t l);

/// Enumerate the overlap-l stratum (l planted members, k-l others).
StratumHistogram stratum_histogram(const PrunedInstance& pr, std::size_t l,
                                   const LandscapeCaps& caps = {});

/// Z_{t,l}: number of k-subsets with overlap l leaving at most t tests uncovered.
std::uint64_t count_z(const PrunedInstance& pr, std::size_t t, std::size_t l,
                      const LandscapeCaps& caps = {});

/// phi(l) = min H over the overlap-l stratum, by direct minimisation.
double phi(const PrunedInstance& pr, std::size_t l, const LandscapeCaps& caps = {});

/// phi(l) as min{t/M : Z_{t,l} >= 1}, by binary search over t on count_z.
double phi_by_threshold(const PrunedInstance& pr, std::size_t l, const LandscapeCaps& caps = {});

struct PhiCurve {
  std::size_t k = 0;
  std::size_t M = 0;  // 0 for synthetic curves
  std::vector<std::size_t> l_values;
  std::vector<double> phi;
  std::vector<std::size_t> phi_uncovered;  // phi * M as an integer (empty if M = 0)
  std::vector<std::optional<KSubset>> argmin_witness;

  /// A curve given by values phi[0..k], without witnesses.
  static PhiCurve from_values(std::vector<double> values);

  std::string to_csv() const;
};

PhiCurve phi_curve(const PrunedInstance& pr, const LandscapeCaps& caps = {});

struct BOGPReport {
  bool holds = false;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double r = 0.0;
  double delta = 0.0;
  std::optional<std::pair<KSubset, KSubset>> witnesses;
};

struct BOGPParams {
  double zeta1;
  double zeta2;
  double r;
  double delta;
};

/// Checks, with overlaps l1 = floor(zeta1 k) and l2 = ceil(zeta2 k):
///   min_{l <= l1} phi(l) < r,  min_{l >= l2} phi(l) < r,
///   phi(l) >= r + delta for every l1 < l < l2 (which must be non-empty).
BOGPReport detect_bogp(const PhiCurve& curve, double zeta1, double zeta2, double r, double delta);

/// Best barrier over integer windows (l1, l2): maximises the gap between the
/// interior minimum and the larger of the two side minima. Returns the window
/// with r halfway across the gap and delta the remaining half.
std::optional<BOGPParams> search_bogp(const PhiCurve& curve);

std::string to_json_string(const BOGPReport& rep);

}  // namespace bgt
