#pragma once

// Scalar information-theoretic primitives. Everything is in nats except the
// binary entropy h2 and its inverse, which are in bits.

#include <cstdint>

namespace bgt {

enum class TailSide { LowerTail, UpperTail };

/// h2(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0.
double binary_entropy(double x);

/// Natural-log entropy h(x) = log(2) * h2(x).
double entropy_nats(double x);

/// The x in [0, 1/2] with h2(x) = v. Bisection to 1e-12.
double entropy_inv_left(double v);

/// The x in [0, 1/2] with h(x) = v, v in [0, log 2].
double entropy_nats_inv_left(double v);

/// Two-point KL divergence D(q1 || q2) in nats. 0 log(0/.) = 0; returns
/// +infinity when q1 puts mass where q2 has none.
double kl_div(double q1, double q2);

/// H_C = h2^{-1}(2 - 2/C) on the left branch, for 1 < C <= 2.
double h_c(double C);

struct TailBounds {
  double lower;
  double upper;
};

/// Chernoff-KL sandwich for Binomial(n, pr):
///   e^{-n D(k/n || pr)} / (3 sqrt n)  <=  P(tail)  <=  e^{-n D(k/n || pr)}.
/// The upper bound is only a bound on the far side of the mean
/// (k <= n pr for LowerTail, k >= n pr for UpperTail); on the near side the
/// returned upper bound is 1.
TailBounds binom_tail_bounds(std::uint64_t n, double pr, std::uint64_t k, TailSide side);

/// Exact P(X <= k) or P(X >= k) for X ~ Binomial(n, pr), n <= 10^4.
double binom_tail_exact(std::uint64_t n, double pr, std::uint64_t k, TailSide side);

/// log C(n, k) for integer arguments.
double log_binom(std::uint64_t n, std::uint64_t k);

/// log Gamma(n+1) - log Gamma(k+1) - log Gamma(n-k+1) for real 0 <= k <= n.
double log_binom_real(double n, double k);

}  // namespace bgt
