#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "bgt/combinations.hpp"
#include "bgt/errors.hpp"
#include "bgt/landscape.hpp"
#include "support.hpp"

using namespace bgt;

namespace {

// Unstratified brute force: every k-subset, filtered by overlap.
std::uint64_t brute_z(const PrunedInstance& pr, std::size_t t, std::size_t l) {
  std::uint64_t z = 0;
  for_each_combination(static_cast<std::uint32_t>(pr.p()), pr.k(),
                       [&](std::span<const std::uint32_t> s) {
                         std::vector<std::uint32_t> v(s.begin(), s.end());
                         std::size_t ov = 0;
                         for (auto i : v) ov += pr.is_planted(i) ? 1 : 0;
                         if (ov == l && testing::naive_uncovered(pr, v) <= t) ++z;
                       });
  return z;
}

}  // namespace

TEST_CASE("count_z against brute force") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto pr = testing::planted_instance(10, 3, 14, 0.15, seed);
    for (std::size_t l = 0; l <= 3; ++l) {
      for (std::size_t t = 0; t <= pr.M(); ++t) CHECK(count_z(pr, t, l) == brute_z(pr, t, l));
      CHECK(count_z(pr, pr.M(), l) == binom_exact(3, l) * binom_exact(7, 3 - l));
      CHECK(stratum_size(pr, l) == static_cast<double>(binom_exact(3, l) * binom_exact(7, 3 - l)));
    }
    CHECK(count_z(pr, 0, 3) >= 1);
  }
}

TEST_CASE("planted stratum has a single subset") {
  auto pr = testing::planted_instance(10, 3, 14, 0.15, 9);
  CHECK(count_z(pr, 0, 3) == 1);
}

TEST_CASE("phi curve") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto pr = testing::planted_instance(11, 3, 20, 0.1, seed);
    auto curve = phi_curve(pr);
    REQUIRE(curve.phi.size() == 4);
    CHECK(curve.phi[3] == 0.0);
    for (std::size_t l = 0; l <= 3; ++l) {
      const double scaled = curve.phi[l] * 20.0;
      CHECK(scaled == std::round(scaled));
      CHECK(curve.phi[l] >= 0.0);
      CHECK(curve.phi[l] <= 1.0);
      CHECK(phi(pr, l) == phi_by_threshold(pr, l));
      REQUIRE(curve.argmin_witness[l].has_value());
      const auto& w = *curve.argmin_witness[l];
      std::vector<std::uint32_t> v(w.members().begin(), w.members().end());
      CHECK(testing::naive_uncovered(pr, v) == curve.phi_uncovered[l]);
      CHECK(overlap(w, pr) == l);
    }
  }
}

TEST_CASE("stratum histogram totals and cap") {
  auto pr = testing::planted_instance(10, 3, 14, 0.15, 2);
  auto h = stratum_histogram(pr, 1);
  CHECK(h.total() == 3 * 21);
  CHECK(h.counts[h.min_uncovered] > 0);
  LandscapeCaps tiny{10};
  CHECK_THROWS_AS(stratum_histogram(pr, 1, tiny), CapExceeded);
}

TEST_CASE("b-OGP on constructed curves") {
  auto c = PhiCurve::from_values({0.1, 0.4, 0.4, 0.0});
  auto rep = detect_bogp(c, 0.0, 1.0, 0.15, 0.2);
  CHECK(rep.holds);
  CHECK_FALSE(detect_bogp(c, 0.0, 1.0, 0.15, 0.3).holds);
  CHECK_FALSE(detect_bogp(c, 0.0, 1.0, 0.05, 0.2).holds);

  // A barrier shape: phi(0) low, a raised plateau in the middle, phi(k) = 0.
  auto shape = PhiCurve::from_values({0.1, 0.12, 0.3, 0.3, 0.3, 0.05, 0.0});
  CHECK(detect_bogp(shape, 1.0 / 6.0, 5.0 / 6.0, 0.11, 0.15).holds);

  auto dec = PhiCurve::from_values({0.5, 0.4, 0.2, 0.1, 0.0});
  CHECK_FALSE(search_bogp(dec).has_value());
  auto found = search_bogp(c);
  REQUIRE(found.has_value());
  CHECK(detect_bogp(c, found->zeta1, found->zeta2, found->r, found->delta * 0.999).holds);
}
