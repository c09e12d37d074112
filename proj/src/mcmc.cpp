#include "bgt/mcmc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "bgt/combinations.hpp"
#include "bgt/errors.hpp"
#include "bgt/landscape.hpp"

namespace bgt {

void validate(const ChainConfig& cfg, const PrunedInstance& pr) {
  if (!(cfg.beta >= 0.0) || !std::isfinite(cfg.beta)) throw DomainError("chain: beta must be finite and >= 0");
  if (cfg.max_steps == 0) throw DomainError("chain: max_steps must be >= 1");
  if (cfg.record_every == 0) throw DomainError("chain: record_every must be >= 1");
  if (cfg.stop_overlap && *cfg.stop_overlap > pr.k()) throw DomainError("chain: stop_overlap exceeds k");
  if (cfg.init == InitKind::Explicit) {
    if (!cfg.explicit_state) throw DomainError("chain: explicit init without a state");
    const auto m = cfg.explicit_state->members();
    if (m.size() != pr.k()) throw DomainError("chain: explicit state has wrong size");
    for (auto i : m) {
      if (i >= pr.p()) throw DomainError("chain: explicit state index out of range");
    }
  }
}

double scaled_beta(double c, std::size_t k, std::size_t p) {
  if (k == 0 || p < k) throw DomainError("scaled_beta: need 1 <= k <= p");
  return c * static_cast<double>(k) * std::log(static_cast<double>(p) / static_cast<double>(k));
}

std::string MCMCTrace::to_csv() const {
  std::string out = "step,energy,overlap,accepted_cum\n";
  char buf[128];
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%llu,%.12g,%zu,%llu\n",
                  static_cast<unsigned long long>(steps[i]), energies[i], overlaps[i],
                  static_cast<unsigned long long>(accepted_cum[i]));
    out += buf;
  }
  return out;
}

ChainState::ChainState(const PrunedInstance& pr, const KSubset& sigma)
    : pr_(&pr), cover_count_(pr.M(), 0) {
  if (pr.M() == 0) throw UndefinedEnergy("chain: no positive tests (M = 0)");
  std::vector<std::uint8_t> in(pr.p(), 0);
  for (auto i : sigma.members()) {
    in[i] = 1;
    members_.push_back(i);
    if (pr.is_planted(i)) ++overlap_;
    for (auto t : pr.tests_of(i)) ++cover_count_[t];
  }
  for (std::size_t i = 0; i < pr.p(); ++i) {
    if (!in[i]) outside_.push_back(static_cast<std::uint32_t>(i));
  }
  for (auto c : cover_count_) uncovered_ += (c == 0);
}

long ChainState::swap_delta(std::size_t a, std::size_t b) const {
  const std::uint32_t i = members_[a];
  const std::uint32_t j = outside_[b];
  const Bitset& cov_j = pr_->coverage(j);
  long d = 0;
  for (auto t : pr_->tests_of(i)) {
    if (cover_count_[t] == 1 && !cov_j.test(t)) ++d;
  }
  for (auto t : pr_->tests_of(j)) {
    if (cover_count_[t] == 0) --d;
  }
  return d;
}

void ChainState::apply_swap(std::size_t a, std::size_t b) {
  const std::uint32_t i = members_[a];
  const std::uint32_t j = outside_[b];
  for (auto t : pr_->tests_of(i)) {
    if (--cover_count_[t] == 0) ++uncovered_;
  }
  for (auto t : pr_->tests_of(j)) {
    if (cover_count_[t]++ == 0) --uncovered_;
  }
  overlap_ = overlap_ - (pr_->is_planted(i) ? 1 : 0) + (pr_->is_planted(j) ? 1 : 0);
  members_[a] = j;
  outside_[b] = i;
}

KSubset ChainState::subset() const { return KSubset(members_, pr_->p(), pr_->k()); }

double acceptance_prob(Kernel kernel, double beta, double dH) {
  const double z = beta * dH;
  if (kernel == Kernel::Glauber) {
    // e^{-beta H'} / (e^{-beta H'} + e^{-beta H}) = 1 / (1 + e^{beta dH})
    if (z > 700.0) return 0.0;
    return 1.0 / (1.0 + std::exp(z));
  }
  return z <= 0.0 ? 1.0 : std::exp(-z);
}

bool chain_step(ChainState& st, const PrunedInstance& pr, double beta, Kernel kernel,
                CounterRng& rng) {
  const std::size_t k = pr.k();
  const std::size_t p = pr.p();
  if (p <= k) throw FrozenChain("chain: p == k, no swap is possible");
  const auto a = static_cast<std::size_t>(rng.below(k));
  const auto b = static_cast<std::size_t>(rng.below(p - k));
  const double u = rng.uniform01();
  const long d = st.swap_delta(a, b);
  const double dH = static_cast<double>(d) / static_cast<double>(pr.M());
  if (u < acceptance_prob(kernel, beta, dH)) {
    st.apply_swap(a, b);
    return true;
  }
  return false;
}

KSubset glauber_step(const KSubset& state, const PrunedInstance& pr, double beta, CounterRng& rng) {
  ChainState st(pr, state);
  chain_step(st, pr, beta, Kernel::Glauber, rng);
  return st.subset();
}

namespace {

std::vector<std::uint32_t> sample_subset(CounterRng& rng, const std::vector<std::uint32_t>& pool,
                                         std::size_t k) {
  // Floyd's algorithm over positions in pool.
  const std::size_t n = pool.size();
  std::unordered_set<std::size_t> chosen;
  std::vector<std::uint32_t> out;
  for (std::size_t j = n - k; j < n; ++j) {
    const auto t = static_cast<std::size_t>(rng.below(j + 1));
    const std::size_t pick = chosen.count(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pool[pick]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

KSubset initial_state(const PrunedInstance& pr, const ChainConfig& cfg) {
  if (cfg.init == InitKind::Explicit) return *cfg.explicit_state;
  CounterRng rng(cfg.seed, CounterRng::kChainInit);
  std::vector<std::uint32_t> pool;
  for (std::size_t i = 0; i < pr.p(); ++i) {
    if (cfg.init == InitKind::UniformRandomKSubset || !pr.is_planted(i)) {
      pool.push_back(static_cast<std::uint32_t>(i));
    }
  }
  if (pool.size() < pr.k()) throw DomainError("chain: fewer than k non-planted candidates");
  return KSubset(sample_subset(rng, pool, pr.k()), pr.p(), pr.k());
}

}  // namespace

MCMCTrace run_chain(const PrunedInstance& pr, const ChainConfig& cfg) {
  validate(cfg, pr);
  ChainState st(pr, initial_state(pr, cfg));
  CounterRng rng(cfg.seed, CounterRng::kChainMoves);
  MCMCTrace tr;

  auto record = [&](std::uint64_t step) {
    tr.steps.push_back(step);
    tr.energies.push_back(st.energy());
    tr.overlaps.push_back(st.overlap());
    tr.accepted_cum.push_back(tr.accepted_moves);
  };
  auto check_stop = [&](std::uint64_t step) {
    if (!tr.hit_step && cfg.stop_overlap && st.overlap() >= *cfg.stop_overlap) tr.hit_step = step;
    if (!tr.zero_energy_step && st.uncovered() == 0) tr.zero_energy_step = step;
    return (cfg.stop_overlap && tr.hit_step) || (cfg.stop_at_zero_energy && tr.zero_energy_step);
  };

  record(0);
  std::uint64_t step = 0;
  bool stopped = check_stop(0);
  while (!stopped && step < cfg.max_steps) {
    ++step;
    if (chain_step(st, pr, cfg.beta, cfg.kernel, rng)) ++tr.accepted_moves;
    stopped = check_stop(step);
    if (step % cfg.record_every == 0 || stopped || step == cfg.max_steps) record(step);
  }
  tr.steps_run = step;
  tr.final_state = st.subset();
  return tr;
}

KernelRow kernel_row(const PrunedInstance& pr, const KSubset& sigma, double beta, Kernel kernel) {
  ChainState st(pr, sigma);
  const std::size_t k = pr.k();
  const std::size_t p = pr.p();
  if (p <= k) throw FrozenChain("kernel_row: p == k");
  const double w = 1.0 / (static_cast<double>(k) * static_cast<double>(p - k));
  KernelRow row;
  double moved = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < p - k; ++b) {
      const double dH = static_cast<double>(st.swap_delta(a, b)) / static_cast<double>(pr.M());
      const double pr_move = w * acceptance_prob(kernel, beta, dH);
      std::vector<std::uint32_t> m(sigma.members().begin(), sigma.members().end());
      std::replace(m.begin(), m.end(), st.member(a), st.outsider(b));
      row.neighbours.emplace_back(std::move(m), p, k);
      row.probs.push_back(pr_move);
      moved += pr_move;
    }
  }
  row.hold = 1.0 - moved;
  return row;
}

StationaryResult stationary_exact(const PrunedInstance& pr, double beta, Kernel kernel,
                                  const MCMCCaps& caps, double tol, std::uint64_t max_iter) {
  if (!(beta >= 0.0)) throw DomainError("stationary_exact: beta must be >= 0");
  const std::size_t k = pr.k();
  const std::size_t p = pr.p();
  const double total = binom_count(p, k);
  if (total > caps.states) throw CapExceeded("stationary_exact", total, caps.states);
  if (pr.M() == 0) throw UndefinedEnergy("stationary_exact: no positive tests (M = 0)");

  StationaryResult res;
  const CombinationRanker ranker(static_cast<std::uint32_t>(p), k);
  const auto S = static_cast<std::size_t>(total);
  std::vector<std::size_t> index_of_rank(S);
  for_each_combination(static_cast<std::uint32_t>(p), k, [&](std::span<const std::uint32_t> c) {
    index_of_rank[ranker.rank(c)] = res.states.size();
    res.states.emplace_back(c.begin(), c.end());
  });

  // Exact kernel in CSR form (off-diagonal) plus the diagonal.
  std::vector<std::size_t> row_start{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  std::vector<double> diag(S);
  for (std::size_t s = 0; s < S; ++s) {
    const KSubset sigma(res.states[s], p, k);
    res.energies.push_back(hamiltonian(pr, sigma));
    if (p > k) {
      const auto row = kernel_row(pr, sigma, beta, kernel);
      for (std::size_t n = 0; n < row.neighbours.size(); ++n) {
        cols.push_back(index_of_rank[ranker.rank(row.neighbours[n].members())]);
        vals.push_back(row.probs[n]);
      }
      diag[s] = row.hold;
    } else {
      diag[s] = 1.0;
    }
    row_start.push_back(cols.size());
  }

  const double emin = *std::min_element(res.energies.begin(), res.energies.end());
  res.gibbs.resize(S);
  double z = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    res.gibbs[s] = std::exp(-beta * (res.energies[s] - emin));
    z += res.gibbs[s];
  }
  for (auto& g : res.gibbs) g /= z;

  std::vector<double> cur(S, 1.0 / static_cast<double>(S)), next(S);
  for (res.iterations = 0; res.iterations < max_iter;) {
    for (std::size_t s = 0; s < S; ++s) next[s] = cur[s] * diag[s];
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t e = row_start[s]; e < row_start[s + 1]; ++e) next[cols[e]] += cur[s] * vals[e];
    }
    double sum = 0.0;
    for (auto v : next) sum += v;
    double change = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      next[s] /= sum;
      change = std::max(change, std::abs(next[s] - cur[s]));
    }
    cur.swap(next);
    ++res.iterations;
    if (change < tol) break;
  }
  res.power = std::move(cur);
  for (std::size_t s = 0; s < S; ++s) {
    res.max_abs_diff = std::max(res.max_abs_diff, std::abs(res.power[s] - res.gibbs[s]));
  }
  return res;
}

double bottleneck_ratio(const PrunedInstance& pr, double beta, double eps1, const MCMCCaps& caps) {
  if (!(eps1 > 0.0 && eps1 < 1.0)) throw DomainError("bottleneck_ratio: eps1 must be in (0,1)");
  if (!(beta >= 0.0)) throw DomainError("bottleneck_ratio: beta must be >= 0");
  if (pr.M() == 0) throw UndefinedEnergy("bottleneck_ratio: no positive tests (M = 0)");
  const auto l = static_cast<std::size_t>(std::floor(eps1 * static_cast<double>(pr.k()) + 1e-9));
  double needed = 0.0;
  for (std::size_t j = 0; j <= l; ++j) needed += stratum_size(pr, j);
  if (needed > caps.states) throw CapExceeded("bottleneck_ratio", needed, caps.states);
  if (needed == 0.0) throw DomainError("bottleneck_ratio: B is empty");

  std::vector<StratumHistogram> hs;
  std::size_t umin = pr.M();
  for (std::size_t j = 0; j <= l; ++j) {
    hs.push_back(stratum_histogram(pr, j, LandscapeCaps{caps.states}));
    if (hs.back().total() > 0) umin = std::min(umin, hs.back().min_uncovered);
  }
  const double M = static_cast<double>(pr.M());
  auto weight = [&](const StratumHistogram& h) {
    double w = 0.0;
    for (std::size_t u = 0; u < h.counts.size(); ++u) {
      if (h.counts[u]) {
        w += static_cast<double>(h.counts[u]) *
             std::exp(-beta * (static_cast<double>(u) - static_cast<double>(umin)) / M);
      }
    }
    return w;
  };
  double wB = 0.0;
  for (const auto& h : hs) wB += weight(h);
  const double wdB = weight(hs[l]);
  if (wB == 0.0) throw NumericalFailure("bottleneck_ratio: pi(B) underflowed");
  return wdB / wB;
}

std::vector<EnsembleEntry> run_ensemble(const PrunedInstance& pr, const ChainConfig& cfg,
                                        const std::vector<std::uint64_t>& seeds,
                                        unsigned threads) {
  validate(cfg, pr);
  std::vector<EnsembleEntry> out(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      ChainConfig c = cfg;
      c.seed = seeds[i];
      const auto t0 = std::chrono::steady_clock::now();
      const auto tr = run_chain(pr, c);
      const auto t1 = std::chrono::steady_clock::now();
      EnsembleEntry& e = out[i];
      e.seed = seeds[i];
      e.hit_step = tr.hit_step;
      e.zero_energy_step = tr.zero_energy_step;
      e.success = cfg.stop_overlap ? tr.hit_step.has_value() : tr.zero_energy_step.has_value();
      e.final_energy = tr.energies.back();
      e.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(seeds.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

std::string ensemble_to_json_string(const std::vector<EnsembleEntry>& runs) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t ok = 0;
  for (const auto& e : runs) {
    nlohmann::json j;
    j["seed"] = e.seed;
    j["hit_step"] = e.hit_step ? nlohmann::json(*e.hit_step) : nlohmann::json(nullptr);
    j["zero_energy_step"] =
        e.zero_energy_step ? nlohmann::json(*e.zero_energy_step) : nlohmann::json(nullptr);
    j["success"] = e.success;
    j["final_energy"] = e.final_energy;
    j["wall_time_s"] = e.wall_seconds;
    arr.push_back(std::move(j));
    ok += e.success;
  }
  nlohmann::json top;
  top["runs"] = std::move(arr);
  top["successes"] = ok;
  top["total"] = runs.size();
  return top.dump(2);
}

}  // namespace bgt
