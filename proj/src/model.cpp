#include "bgt/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_set>

#include "bgt/errors.hpp"
#include "bgt/mathcore.hpp"
#include "bgt/rng.hpp"

namespace bgt {

KSubset::KSubset(std::vector<std::uint32_t> members, std::size_t p, std::size_t k)
    : members_(std::move(members)) {
  if (members_.size() != k) {
    throw DomainError("KSubset: expected " + std::to_string(k) + " members, got " +
                      std::to_string(members_.size()));
  }
  std::sort(members_.begin(), members_.end());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] >= p) throw DomainError("KSubset: index out of range");
    if (i > 0 && members_[i] == members_[i - 1]) throw DomainError("KSubset: duplicate member");
  }
}

bool KSubset::contains(std::uint32_t i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

double assignment_prob(std::uint64_t k) {
  if (k < 1) throw DomainError("assignment_prob: k must be >= 1");
  // 1 - 2^{-1/k} = -expm1(-log 2 / k)
  return -std::expm1(-std::numbers::ln2 / static_cast<double>(k));
}

std::uint64_t num_tests(std::uint64_t n, std::uint64_t k, double C) {
  if (k < 1 || k > n) throw DomainError("num_tests: need 1 <= k <= n");
  if (!(C > 1.0)) throw DomainError("num_tests: need C > 1");
  const double v = C * log_binom(n, k) / std::numbers::ln2;
  return static_cast<std::uint64_t>(std::floor(v * (1.0 + 1e-14)));
}

std::uint64_t infected_count(std::uint64_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const double v = std::pow(static_cast<double>(n), alpha);
  return static_cast<std::uint64_t>(std::floor(v * (1.0 + 1e-12)));
}

namespace {

void check_C(double C) {
  if (!(C > 1.0)) throw DomainError("C must exceed 1");
  if (C >= 2.0) {
    throw DomainError(
        "C >= 2 rejected: in that regime COMP alone outputs only the infected individuals, "
        "so the landscape is trivial; use 1 < C < 2");
  }
}

GTInstance sample_impl(std::uint64_t n, std::uint64_t k, double alpha, double C,
                       std::uint64_t seed, const SampleOptions& opts) {
  if (k == 0) throw DomainError("sample_instance: k = floor(n^alpha) is 0");
  if (k > n) throw DomainError("sample_instance: k exceeds n");
  if (n > UINT32_MAX) throw DomainError("sample_instance: n exceeds 2^32 - 1");
  check_C(C);

  GTInstance inst;
  inst.n = n;
  inst.k = k;
  inst.alpha = alpha;
  inst.C = C;
  inst.q = assignment_prob(k);
  inst.N = num_tests(n, k, C);
  inst.seed = seed;

  const double expected_members = static_cast<double>(n) * static_cast<double>(inst.N) * inst.q;
  const double required = expected_members * sizeof(std::uint32_t) +
                          static_cast<double>(inst.N) * (sizeof(std::vector<std::uint32_t>) + 1) +
                          static_cast<double>(k) * sizeof(std::uint32_t);
  if (required > static_cast<double>(opts.memory_budget_bytes)) {
    throw CapExceeded("sample_instance (bytes)", required,
                      static_cast<double>(opts.memory_budget_bytes));
  }

  // Floyd's algorithm: uniform k-subset of [n].
  CounterRng planted_rng(seed, CounterRng::kPlanted);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(k * 2);
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = planted_rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  inst.sigma_star.assign(chosen.begin(), chosen.end());
  std::sort(inst.sigma_star.begin(), inst.sigma_star.end());

  std::vector<std::uint8_t> infected(n, 0);
  for (auto i : inst.sigma_star) infected[i] = 1;

  // Each (individual, test) pair is an independent Bernoulli(q); within a test
  // the members are generated by geometric gaps.
  CounterRng member_rng(seed, CounterRng::kMembership);
  inst.tests.resize(inst.N);
  inst.outcomes.assign(inst.N, 0);
  for (std::uint64_t j = 0; j < inst.N; ++j) {
    auto& row = inst.tests[j];
    std::uint64_t pos = member_rng.geometric(inst.q);
    while (pos < n) {
      row.push_back(static_cast<std::uint32_t>(pos));
      if (infected[pos]) inst.outcomes[j] = 1;
      const std::uint64_t gap = member_rng.geometric(inst.q);
      if (gap >= n) break;
      pos += gap + 1;
    }
  }
  return inst;
}

}  // namespace

GTInstance sample_instance(std::uint64_t n, double alpha, double C, std::uint64_t seed,
                           const SampleOptions& opts) {
  return sample_impl(n, infected_count(n, alpha), alpha, C, seed, opts);
}

GTInstance sample_instance_k(std::uint64_t n, std::uint64_t k, double C, std::uint64_t seed,
                             const SampleOptions& opts) {
  if (n < 2) throw DomainError("sample_instance_k: n must be >= 2");
  const double alpha = std::log(static_cast<double>(k)) / std::log(static_cast<double>(n));
  return sample_impl(n, k, alpha, C, seed, opts);
}

void validate(const GTInstance& inst) {
  if (inst.sigma_star.size() != inst.k) throw DomainError("instance: |sigma_star| != k");
  if (inst.tests.size() != inst.N || inst.outcomes.size() != inst.N) {
    throw DomainError("instance: test count differs from N");
  }
  std::vector<std::uint8_t> infected(inst.n, 0);
  for (auto i : inst.sigma_star) {
    if (i >= inst.n) throw DomainError("instance: planted index out of range");
    infected[i] = 1;
  }
  for (std::size_t j = 0; j < inst.N; ++j) {
    bool pos = false;
    for (auto i : inst.tests[j]) {
      if (i >= inst.n) throw DomainError("instance: test member out of range");
      pos = pos || infected[i];
    }
    if (pos != (inst.outcomes[j] != 0)) {
      throw DomainError("instance: outcome of test " + std::to_string(j) + " is inconsistent");
    }
  }
}

void PrunedInstance::finish() {
  const std::size_t p = coverage_.size();
  adjacency_.assign(p, {});
  for (std::size_t i = 0; i < p; ++i) adjacency_[i] = coverage_[i].indices();
  std::sort(sigma_star_local_.begin(), sigma_star_local_.end());
  planted_.assign(p, 0);
  for (auto i : sigma_star_local_) {
    if (i >= p) throw DomainError("pruned instance: planted index out of range");
    planted_[i] = 1;
  }
  if (candidates_.empty()) {
    candidates_.resize(p);
    for (std::size_t i = 0; i < p; ++i) candidates_[i] = static_cast<std::uint32_t>(i);
  }
}

PrunedInstance PrunedInstance::from_coverage(std::size_t M, std::vector<Bitset> coverage,
                                             std::vector<std::uint32_t> sigma_star_local,
                                             std::vector<std::uint32_t> candidates) {
  PrunedInstance pr;
  pr.M_ = M;
  for (const auto& row : coverage) {
    if (row.size() != M) throw DomainError("from_coverage: coverage row length differs from M");
  }
  pr.coverage_ = std::move(coverage);
  pr.sigma_star_local_ = std::move(sigma_star_local);
  pr.candidates_ = std::move(candidates);
  pr.finish();
  return pr;
}

PrunedInstance comp_prune(const GTInstance& inst) {
  std::vector<std::uint8_t> excluded(inst.n, 0);
  std::vector<std::uint32_t> positive;
  for (std::size_t j = 0; j < inst.N; ++j) {
    if (inst.outcomes[j]) {
      positive.push_back(static_cast<std::uint32_t>(j));
    } else {
      for (auto i : inst.tests[j]) excluded[i] = 1;
    }
  }
  PrunedInstance pr;
  pr.M_ = positive.size();
  std::vector<std::uint32_t> local_of(inst.n, UINT32_MAX);
  for (std::uint32_t i = 0; i < inst.n; ++i) {
    if (!excluded[i]) {
      local_of[i] = static_cast<std::uint32_t>(pr.candidates_.size());
      pr.candidates_.push_back(i);
    }
  }
  pr.coverage_.assign(pr.candidates_.size(), Bitset(pr.M_));
  for (std::size_t m = 0; m < positive.size(); ++m) {
    for (auto i : inst.tests[positive[m]]) {
      if (local_of[i] != UINT32_MAX) pr.coverage_[local_of[i]].set(m);
    }
  }
  for (auto i : inst.sigma_star) {
    if (local_of[i] == UINT32_MAX) throw DomainError("comp_prune: an infected individual was pruned");
    pr.sigma_star_local_.push_back(local_of[i]);
  }
  pr.finish();
  return pr;
}

std::size_t uncovered_count(const PrunedInstance& pr, const KSubset& sigma) {
  Bitset acc(pr.M());
  for (auto i : sigma.members()) acc |= pr.coverage(i);
  return pr.M() - acc.count();
}

double hamiltonian(const PrunedInstance& pr, const KSubset& sigma) {
  if (pr.M() == 0) throw UndefinedEnergy("hamiltonian: no positive tests (M = 0)");
  return static_cast<double>(uncovered_count(pr, sigma)) / static_cast<double>(pr.M());
}

std::size_t overlap(const KSubset& sigma, const PrunedInstance& pr) {
  std::size_t c = 0;
  for (auto i : sigma.members()) c += pr.is_planted(i) ? 1 : 0;
  return c;
}

Scales deterministic_scales(std::uint64_t n, std::uint64_t k, double C) {
  if (k < 1 || k >= n) throw DomainError("deterministic_scales: need 1 <= k < n");
  const double N = static_cast<double>(num_tests(n, k, C));
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return {N / 2.0, nd * std::pow(kd / nd, C / 2.0) + kd};
}

}  // namespace bgt
