#include "bgt/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>

#include <json.hpp>

#include "bgt/combinations.hpp"
#include "bgt/enumerate.hpp"
#include "bgt/errors.hpp"

namespace bgt {

namespace {

struct Split {
  std::vector<const Bitset*> planted_rows;
  std::vector<std::uint32_t> planted_ids;
  std::vector<const Bitset*> other_rows;
  std::vector<std::uint32_t> other_ids;
};

Split split_rows(const PrunedInstance& pr) {
  Split s;
  for (std::size_t i = 0; i < pr.p(); ++i) {
    if (pr.is_planted(i)) {
      s.planted_rows.push_back(&pr.coverage(i));
      s.planted_ids.push_back(static_cast<std::uint32_t>(i));
    } else {
      s.other_rows.push_back(&pr.coverage(i));
      s.other_ids.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return s;
}

void check_stratum(const PrunedInstance& pr, std::size_t l, const LandscapeCaps& caps,
                   const char* op) {
  if (l > pr.k()) throw DomainError(std::string(op) + ": overlap l exceeds k");
  const double size = stratum_size(pr, l);
  if (size > caps.stratum) throw CapExceeded(op, size, caps.stratum);
}

// Visits every subset of the overlap-l stratum: f(uncovered, planted_idx, other_idx).
template <class F>
void visit_stratum(const PrunedInstance& pr, const Split& s, std::size_t l, F&& f) {
  const std::size_t M = pr.M();
  const std::vector<std::uint64_t> zero(Bitset(M).num_words(), 0);
  for_each_union(s.planted_rows, l, zero,
                 [&](std::span<const std::uint64_t> base, std::span<const std::uint32_t> pidx) {
                   const std::vector<std::uint32_t> pcopy(pidx.begin(), pidx.end());
                   for_each_union(s.other_rows, pr.k() - l, base,
                                  [&](std::span<const std::uint64_t> u,
                                      std::span<const std::uint32_t> oidx) {
                                    f(M - popcount_words(u), std::span<const std::uint32_t>(pcopy),
                                      oidx);
                                  });
                 });
}

KSubset make_witness(const PrunedInstance& pr, const Split& s, std::span<const std::uint32_t> pidx,
                     std::span<const std::uint32_t> oidx) {
  std::vector<std::uint32_t> m;
  for (auto i : pidx) m.push_back(s.planted_ids[i]);
  for (auto i : oidx) m.push_back(s.other_ids[i]);
  return KSubset(std::move(m), pr.p(), pr.k());
}

}  // namespace

std::uint64_t StratumHistogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

double stratum_size(const PrunedInstance& pr, std::size_t l) {
  if (l > pr.k()) return 0.0;
  const std::size_t others = pr.p() - pr.k();
  if (pr.k() - l > others) return 0.0;
  return binom_count(pr.k(), l) * binom_count(others, pr.k() - l);
}

StratumHistogram stratum_histogram(const PrunedInstance& pr, std::size_t l,
                                   const LandscapeCaps& caps) {
  check_stratum(pr, l, caps, "stratum_histogram");
  const Split s = split_rows(pr);
  StratumHistogram h;
  h.l = l;
  h.counts.assign(pr.M() + 1, 0);
  h.min_uncovered = std::numeric_limits<std::size_t>::max();
  visit_stratum(pr, s, l,
                [&](std::size_t unc, std::span<const std::uint32_t> pidx,
                    std::span<const std::uint32_t> oidx) {
                  ++h.counts[unc];
                  if (unc < h.min_uncovered) {
                    h.min_uncovered = unc;
                    h.witness = make_witness(pr, s, pidx, oidx);
                  }
                });
  return h;
}

std::uint64_t count_z(const PrunedInstance& pr, std::size_t t, std::size_t l,
                      const LandscapeCaps& caps) {
  if (t > pr.M()) throw DomainError("count_z: t exceeds M");
  const auto h = stratum_histogram(pr, l, caps);
  std::uint64_t z = 0;
  for (std::size_t u = 0; u <= t; ++u) z += h.counts[u];
  return z;
}

double phi(const PrunedInstance& pr, std::size_t l, const LandscapeCaps& caps) {
  if (pr.M() == 0) throw UndefinedEnergy("phi: no positive tests (M = 0)");
  check_stratum(pr, l, caps, "phi");
  if (stratum_size(pr, l) == 0.0) throw DomainError("phi: empty overlap stratum");
  const Split s = split_rows(pr);
  std::size_t best = pr.M();
  visit_stratum(pr, s, l,
                [&](std::size_t unc, std::span<const std::uint32_t>, std::span<const std::uint32_t>) {
                  best = std::min(best, unc);
                });
  return static_cast<double>(best) / static_cast<double>(pr.M());
}

double phi_by_threshold(const PrunedInstance& pr, std::size_t l, const LandscapeCaps& caps) {
  if (pr.M() == 0) throw UndefinedEnergy("phi_by_threshold: no positive tests (M = 0)");
  if (stratum_size(pr, l) == 0.0) throw DomainError("phi_by_threshold: empty overlap stratum");
  // Z_{t,l} is nondecreasing in t and Z_{M,l} >= 1.
  std::size_t lo = 0, hi = pr.M();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (count_z(pr, mid, l, caps) >= 1) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return static_cast<double>(lo) / static_cast<double>(pr.M());
}

PhiCurve PhiCurve::from_values(std::vector<double> values) {
  if (values.empty()) throw DomainError("PhiCurve: need at least one value");
  PhiCurve c;
  c.k = values.size() - 1;
  for (std::size_t l = 0; l <= c.k; ++l) c.l_values.push_back(l);
  c.phi = std::move(values);
  c.argmin_witness.assign(c.k + 1, std::nullopt);
  return c;
}

std::string PhiCurve::to_csv() const {
  std::string out = "l,x,phi,phiM_int\n";
  char buf[160];
  for (std::size_t i = 0; i < l_values.size(); ++i) {
    const double x = k == 0 ? 0.0 : static_cast<double>(l_values[i]) / static_cast<double>(k);
    if (phi_uncovered.empty()) {
      std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,\n", l_values[i], x, phi[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%zu\n", l_values[i], x, phi[i],
                    phi_uncovered[i]);
    }
    out += buf;
  }
  return out;
}

PhiCurve phi_curve(const PrunedInstance& pr, const LandscapeCaps& caps) {
  if (pr.M() == 0) throw UndefinedEnergy("phi_curve: no positive tests (M = 0)");
  PhiCurve c;
  c.k = pr.k();
  c.M = pr.M();
  for (std::size_t l = 0; l <= pr.k(); ++l) {
    if (stratum_size(pr, l) == 0.0) continue;
    auto h = stratum_histogram(pr, l, caps);
    c.l_values.push_back(l);
    c.phi.push_back(static_cast<double>(h.min_uncovered) / static_cast<double>(pr.M()));
    c.phi_uncovered.push_back(h.min_uncovered);
    c.argmin_witness.push_back(std::move(h.witness));
  }
  return c;
}

namespace {

constexpr double kWindowEps = 1e-9;

struct SideMin {
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  bool any = false;
};

}  // namespace

BOGPReport detect_bogp(const PhiCurve& curve, double zeta1, double zeta2, double r, double delta) {
  if (!(zeta1 < zeta2)) throw DomainError("detect_bogp: degenerate window (zeta1 >= zeta2)");
  if (!(zeta1 >= 0.0 && zeta2 <= 1.0)) throw DomainError("detect_bogp: zeta outside [0,1]");
  BOGPReport rep{false, zeta1, zeta2, r, delta, std::nullopt};
  const double kd = static_cast<double>(curve.k);
  const auto l1 = static_cast<std::size_t>(std::floor(zeta1 * kd + kWindowEps));
  const auto l2 = static_cast<std::size_t>(std::ceil(zeta2 * kd - kWindowEps));
  SideMin lo, hi;
  double interior = std::numeric_limits<double>::infinity();
  bool interior_any = false;
  for (std::size_t i = 0; i < curve.l_values.size(); ++i) {
    const std::size_t l = curve.l_values[i];
    const double v = curve.phi[i];
    if (l <= l1 && (!lo.any || v < lo.value)) lo = {v, i, true};
    if (l >= l2 && (!hi.any || v < hi.value)) hi = {v, i, true};
    if (l > l1 && l < l2) {
      interior = std::min(interior, v);
      interior_any = true;
    }
  }
  rep.holds = lo.any && hi.any && interior_any && lo.value < r && hi.value < r &&
              interior >= r + delta && delta > 0.0;
  if (rep.holds && curve.argmin_witness.size() == curve.l_values.size() &&
      curve.argmin_witness[lo.index] && curve.argmin_witness[hi.index]) {
    rep.witnesses.emplace(*curve.argmin_witness[lo.index], *curve.argmin_witness[hi.index]);
  }
  return rep;
}

std::optional<BOGPParams> search_bogp(const PhiCurve& curve) {
  const std::size_t n = curve.l_values.size();
  std::optional<BOGPParams> best;
  double best_gap = 0.0;
  const double kd = static_cast<double>(curve.k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      double left = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a <= i; ++a) left = std::min(left, curve.phi[a]);
      double right = std::numeric_limits<double>::infinity();
      for (std::size_t b = j; b < n; ++b) right = std::min(right, curve.phi[b]);
      double mid = std::numeric_limits<double>::infinity();
      for (std::size_t c = i + 1; c < j; ++c) mid = std::min(mid, curve.phi[c]);
      const double base = std::max(left, right);
      const double gap = mid - base;
      if (gap > best_gap) {
        best_gap = gap;
        best = BOGPParams{static_cast<double>(curve.l_values[i]) / kd,
                          static_cast<double>(curve.l_values[j]) / kd, base + gap / 2.0, gap / 2.0};
      }
    }
  }
  return best;
}

std::string to_json_string(const BOGPReport& rep) {
  nlohmann::json j;
  j["holds"] = rep.holds;
  j["zeta1"] = rep.zeta1;
  j["zeta2"] = rep.zeta2;
  j["r"] = rep.r;
  j["delta"] = rep.delta;
  if (rep.witnesses) {
    const auto& [a, b] = *rep.witnesses;
    j["witnesses"] = nlohmann::json::array(
        {std::vector<std::uint32_t>(a.members().begin(), a.members().end()),
         std::vector<std::uint32_t>(b.members().begin(), b.members().end())});
  } else {
    j["witnesses"] = nullptr;
  }
  return j.dump();
}

}  // namespace bgt
