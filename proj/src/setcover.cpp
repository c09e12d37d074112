#include "bgt/setcover.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "bgt/combinations.hpp"
#include "bgt/enumerate.hpp"
#include "bgt/errors.hpp"
#include "bgt/mathcore.hpp"
#include "bgt/model.hpp"
#include "bgt/rng.hpp"

namespace bgt {

CoverInstance CoverInstance::from_sets(std::size_t P, std::size_t k, std::vector<Bitset> sets) {
  if (P == 0 || k == 0) throw DomainError("cover: P and k must be >= 1");
  if (k > P) throw DomainError("cover: k exceeds the universe size");
  CoverInstance c;
  c.universe_size = P;
  c.num_sets = sets.size();
  c.k = k;
  c.q = assignment_prob(k);
  c.elements.assign(P, Bitset(sets.size()));
  for (std::size_t m = 0; m < sets.size(); ++m) {
    if (sets[m].size() != P) throw DomainError("cover: set length differs from P");
    for (auto i : sets[m].indices()) c.elements[i].set(m);
  }
  c.sets = std::move(sets);
  return c;
}

CoverInstance sample_cover(std::size_t P, std::size_t M, std::size_t k, std::uint64_t seed) {
  if (M == 0) throw DomainError("sample_cover: M must be >= 1");
  if (k == 0 || P == 0 || k > P) throw DomainError("sample_cover: need 1 <= k <= P");
  const double q = assignment_prob(k);
  CounterRng rng(seed, CounterRng::kCoverSets);
  std::vector<Bitset> sets(M, Bitset(P));
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t i = 0; i < P; ++i) {
      if (rng.bernoulli(q)) sets[m].set(i);
    }
  }
  auto c = CoverInstance::from_sets(P, k, std::move(sets));
  c.seed = seed;
  return c;
}

CoverDims cover_dims_from_model(std::uint64_t n, double alpha, double C) {
  const std::uint64_t k = infected_count(n, alpha);
  const auto sc = deterministic_scales(n, k, C);
  const auto P = static_cast<std::size_t>(std::llround(sc.p_det)) - k;
  return {P, static_cast<std::size_t>(std::llround(sc.M_det)), k};
}

namespace {

std::vector<const Bitset*> element_rows(const CoverInstance& inst) {
  std::vector<const Bitset*> rows;
  for (const auto& e : inst.elements) rows.push_back(&e);
  return rows;
}

double fraction(std::size_t covered, std::size_t M) {
  return M == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(M);
}

}  // namespace

CoverResult phi_k_exact(const CoverInstance& inst, const CoverCaps& caps) {
  const double total = binom_count(inst.universe_size, inst.k);
  if (total > caps.subsets) throw CapExceeded("phi_k_exact", total, caps.subsets);
  const auto rows = element_rows(inst);
  const std::vector<std::uint64_t> zero(Bitset(inst.num_sets).num_words(), 0);
  CoverResult best;
  bool first = true;
  for_each_union(rows, inst.k, zero,
                 [&](std::span<const std::uint64_t> u, std::span<const std::uint32_t> idx) {
                   const std::size_t c = popcount_words(u);
                   if (first || c > best.covered) {
                     first = false;
                     best.covered = c;
                     best.witness.assign(idx.begin(), idx.end());
                   }
                 });
  best.phi = fraction(best.covered, inst.num_sets);
  return best;
}

CoverResult phi_k_greedy(const CoverInstance& inst) {
  Bitset hit(inst.num_sets);
  std::vector<std::uint8_t> used(inst.universe_size, 0);
  CoverResult res;
  for (std::size_t step = 0; step < inst.k; ++step) {
    std::size_t best_i = inst.universe_size;
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < inst.universe_size; ++i) {
      if (used[i]) continue;
      const std::size_t gain = union_count(hit.words(), inst.elements[i].words()) - hit.count();
      if (best_i == inst.universe_size || gain > best_gain) {
        best_i = i;
        best_gain = gain;
      }
    }
    used[best_i] = 1;
    hit |= inst.elements[best_i];
    res.witness.push_back(static_cast<std::uint32_t>(best_i));
  }
  std::sort(res.witness.begin(), res.witness.end());
  res.covered = hit.count();
  res.phi = fraction(res.covered, inst.num_sets);
  return res;
}

double phi_k_random_mean(const CoverInstance& inst, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw DomainError("phi_k_random_mean: trials must be >= 1");
  CounterRng rng(seed, CounterRng::kAux);
  std::vector<std::uint32_t> perm(inst.universe_size);
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<std::uint32_t>(i);
    // partial Fisher-Yates
    for (std::size_t i = 0; i < inst.k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(perm.size() - i));
      std::swap(perm[i], perm[j]);
    }
    Bitset hit(inst.num_sets);
    for (std::size_t i = 0; i < inst.k; ++i) hit |= inst.elements[perm[i]];
    sum += fraction(hit.count(), inst.num_sets);
  }
  return sum / static_cast<double>(trials);
}

double phi_k_limit(double C) {
  if (!(C > 1.0 && C <= 2.0)) throw DomainError("phi_k_limit: C must be in (1,2]");
  return 1.0 - h_c(C);
}

SubsetProps subset_props(std::size_t k, std::size_t l, double y) {
  if (k == 0 || l > k) throw DomainError("subset_props: need 0 <= l <= k, k >= 1");
  if (!(y > 0.0 && y < 0.5)) throw DomainError("subset_props: y must be in (0, 1/2)");
  const double p_l = std::exp2(1.0 - static_cast<double>(l) / static_cast<double>(k)) - 1.0;
  return {p_l, y + p_l * (1.0 - y)};
}

double flat_radius(std::size_t k, std::size_t l, double y, double M, double c_dl) {
  if (!(M >= 0.0) || !(c_dl >= 0.0)) throw DomainError("flat_radius: M and c must be >= 0");
  const auto [p_l, y_l] = subset_props(k, l, y);
  (void)y_l;
  const double bracket = log_binom(k, l) + (1.0 + c_dl) * std::log(static_cast<double>(k));
  return std::sqrt(6.0 * p_l * (1.0 - p_l) * (1.0 - y) * M * bracket);
}

std::size_t uncovered_sets(const CoverInstance& inst, const std::vector<std::uint32_t>& elems) {
  Bitset hit(inst.num_sets);
  for (auto i : elems) hit |= inst.elements.at(i);
  return inst.num_sets - hit.count();
}

namespace {

struct FlatChecker {
  const CoverInstance& inst;
  std::size_t k;
  std::vector<double> centre;
  std::vector<double> radius;

  FlatChecker(const CoverInstance& in, std::size_t kk, double y, double c_dl) : inst(in), k(kk) {
    const double M = static_cast<double>(in.num_sets);
    for (std::size_t l = 0; l <= k; ++l) {
      centre.push_back(M * subset_props(k, l, y).y_l);
      radius.push_back(flat_radius(k, l, y, M, c_dl));
    }
  }

  bool check(const std::vector<std::uint32_t>& sigma) const {
    const std::size_t W = Bitset(inst.num_sets).num_words();
    std::vector<std::uint64_t> stack((k + 1) * W, 0);
    auto rec = [&](auto&& self, std::size_t pos, std::size_t l) -> bool {
      if (pos == sigma.size()) {
        const double unc =
            static_cast<double>(inst.num_sets) -
            static_cast<double>(popcount_words(std::span<const std::uint64_t>(&stack[l * W], W)));
        return std::abs(unc - centre[l]) <= radius[l] + 1e-9;
      }
      if (!self(self, pos + 1, l)) return false;
      const auto w = inst.elements[sigma[pos]].words();
      for (std::size_t x = 0; x < W; ++x) stack[(l + 1) * W + x] = stack[l * W + x] | w[x];
      return self(self, pos + 1, l + 1);
    };
    return rec(rec, 0, 0);
  }
};

}  // namespace

bool is_flat(const CoverInstance& inst, const std::vector<std::uint32_t>& sigma, double y,
             double c_dl, const CoverCaps& caps) {
  if (static_cast<double>(sigma.size()) > caps.flat_k) {
    throw CapExceeded("is_flat", std::exp2(static_cast<double>(sigma.size())), std::exp2(caps.flat_k));
  }
  if (sigma.size() != inst.k) throw DomainError("is_flat: sigma must have k elements");
  return FlatChecker(inst, inst.k, y, c_dl).check(sigma);
}

FlatCount count_flat(const CoverInstance& inst, double y, double c_dl, const CoverCaps& caps) {
  if (inst.num_sets == 0) throw DomainError("count_flat: no sets");
  if (static_cast<double>(inst.k) > caps.flat_k) {
    throw CapExceeded("count_flat", std::exp2(static_cast<double>(inst.k)), std::exp2(caps.flat_k));
  }
  const double total = binom_count(inst.universe_size, inst.k);
  if (total > caps.subsets) throw CapExceeded("count_flat", total, caps.subsets);
  FlatCount fc;
  fc.t = static_cast<std::size_t>(std::llround(y * static_cast<double>(inst.num_sets)));
  fc.y_used = static_cast<double>(fc.t) / static_cast<double>(inst.num_sets);
  const FlatChecker checker(inst, inst.k, fc.y_used, c_dl);
  const auto rows = element_rows(inst);
  const std::vector<std::uint64_t> zero(Bitset(inst.num_sets).num_words(), 0);
  std::vector<std::uint32_t> sigma(inst.k);
  for_each_union(rows, inst.k, zero,
                 [&](std::span<const std::uint64_t> u, std::span<const std::uint32_t> idx) {
                   const std::size_t unc = inst.num_sets - popcount_words(u);
                   if (unc <= fc.t) ++fc.Z_at_most;
                   if (unc != fc.t) return;
                   ++fc.Z_exact;
                   sigma.assign(idx.begin(), idx.end());
                   if (checker.check(sigma)) ++fc.Y;
                 });
  return fc;
}

std::string cover_report_json(const CoverInstance& inst, const CoverResult& exact,
                              const CoverResult& greedy, double random_mean, double C) {
  nlohmann::json j;
  j["P"] = inst.universe_size;
  j["M"] = inst.num_sets;
  j["k"] = inst.k;
  j["q"] = inst.q;
  j["seed"] = inst.seed;
  j["phi_exact"] = exact.phi;
  j["phi_greedy"] = greedy.phi;
  j["phi_random_mean"] = random_mean;
  j["phi_limit"] = phi_k_limit(C);
  j["C"] = C;
  j["witness"] = exact.witness;
  return j.dump(2);
}

}  // namespace bgt
