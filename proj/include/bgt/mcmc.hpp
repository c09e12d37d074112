#pragma once

// Local chains on the Johnson graph of k-subsets targeting pi_beta ∝ exp(-beta H).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bgt/model.hpp"
#include "bgt/rng.hpp"

namespace bgt {

enum class Kernel { Glauber, Metropolis };
enum class InitKind { UniformRandomKSubset, DisjointFromPlanted, Explicit };

struct ChainConfig {
  double beta = 0.0;
  std::uint64_t max_steps = 1;
  InitKind init = InitKind::UniformRandomKSubset;
  std::optional<KSubset> explicit_state;  // required when init == Explicit
  std::optional<std::size_t> stop_overlap;
  bool stop_at_zero_energy = false;
  std::uint64_t record_every = 1;
  std::uint64_t seed = 0;
  Kernel kernel = Kernel::Glauber;
};

/// Throws DomainError on beta < 0, max_steps == 0, record_every == 0,
/// stop_overlap > k or a missing / invalid explicit state.
void validate(const ChainConfig& cfg, const PrunedInstance& pr);

/// beta = c k log(p/k).
double scaled_beta(double c, std::size_t k, std::size_t p);

struct MCMCTrace {
  std::vector<std::uint64_t> steps;
  std::vector<double> energies;
  std::vector<std::size_t> overlaps;
  std::vector<std::uint64_t> accepted_cum;
  std::optional<std::uint64_t> hit_step;          // first step with overlap >= stop_overlap
  std::optional<std::uint64_t> zero_energy_step;  // first step with H = 0
  KSubset final_state;
  std::uint64_t accepted_moves = 0;
  std::uint64_t steps_run = 0;

  std::string to_csv() const;  // step,energy,overlap,accepted_cum
};

/// Mutable chain state with per-test cover counts, so a swap costs O(deg).
class ChainState {
 public:
  ChainState(const PrunedInstance& pr, const KSubset& sigma);

  std::size_t uncovered() const noexcept { return uncovered_; }
  std::size_t overlap() const noexcept { return overlap_; }
  double energy() const { return static_cast<double>(uncovered_) / static_cast<double>(pr_->M()); }

  /// Candidate at position a of the member list / position b of the outside list.
  std::uint32_t member(std::size_t a) const { return members_[a]; }
  std::uint32_t outsider(std::size_t b) const { return outside_[b]; }

  /// Change in the uncovered count if member a is swapped for outsider b.
  long swap_delta(std::size_t a, std::size_t b) const;
  void apply_swap(std::size_t a, std::size_t b);

  KSubset subset() const;

 private:
  const PrunedInstance* pr_;
  std::vector<std::uint32_t> members_;
  std::vector<std::uint32_t> outside_;
  std::vector<std::uint32_t> cover_count_;
  std::size_t uncovered_ = 0;
  std::size_t overlap_ = 0;
};

/// Probability of accepting a proposal that changes H by dH.
double acceptance_prob(Kernel kernel, double beta, double dH);

/// One step: pick (i in sigma, j not in sigma) uniformly among k(p-k) pairs,
/// then accept sigma - i + j with the kernel's acceptance probability.
/// Consumes exactly three draws from rng. Returns true on acceptance.
bool chain_step(ChainState& st, const PrunedInstance& pr, double beta, Kernel kernel,
                CounterRng& rng);

/// Functional form of one heat-bath step.
KSubset glauber_step(const KSubset& state, const PrunedInstance& pr, double beta, CounterRng& rng);

MCMCTrace run_chain(const PrunedInstance& pr, const ChainConfig& cfg);

struct KernelRow {
  std::vector<KSubset> neighbours;
  std::vector<double> probs;  // P(sigma, neighbour)
  double hold = 0.0;          // P(sigma, sigma)
};

/// Exact transition row of sigma: every neighbour with its probability plus
/// the holding probability.
KernelRow kernel_row(const PrunedInstance& pr, const KSubset& sigma, double beta,
                     Kernel kernel = Kernel::Glauber);

struct MCMCCaps {
  double states = 2e6;  // max C(p,k) for exact stationary analysis
};

struct StationaryResult {
  std::vector<std::vector<std::uint32_t>> states;  // lexicographic order
  std::vector<double> energies;
  std::vector<double> gibbs;  // exp(-beta H)/Z
  std::vector<double> power;  // fixed point of the exact kernel
  double max_abs_diff = 0.0;
  std::uint64_t iterations = 0;
};

/// Gibbs vector and the power-iteration fixed point of the exact kernel.
/// Power iteration stops when successive iterates differ by < tol (max norm).
StationaryResult stationary_exact(const PrunedInstance& pr, double beta,
                                  Kernel kernel = Kernel::Glauber, const MCMCCaps& caps = {},
                                  double tol = 1e-15, std::uint64_t max_iter = 10'000'000);

/// pi(dB)/pi(B) with B = {overlap <= floor(eps1 k)} and dB = {overlap = floor(eps1 k)}.
double bottleneck_ratio(const PrunedInstance& pr, double beta, double eps1,
                        const MCMCCaps& caps = {});

struct EnsembleEntry {
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> hit_step;
  std::optional<std::uint64_t> zero_energy_step;
  bool success = false;
  double final_energy = 0.0;
  double wall_seconds = 0.0;
};

/// Runs one chain per seed (cfg.seed is replaced) on up to `threads` threads.
/// A run succeeds when it hits stop_overlap if that is set, else when it
/// reaches zero energy. Results are in seed order.
std::vector<EnsembleEntry> run_ensemble(const PrunedInstance& pr, const ChainConfig& cfg,
                                        const std::vector<std::uint64_t>& seeds,
                                        unsigned threads = 1);

std::string ensemble_to_json_string(const std::vector<EnsembleEntry>& runs);

}  // namespace bgt
