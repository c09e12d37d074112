#pragma once

// The conditional first moment function y(x) and its unconditional variant.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bgt {

/// How the log-binomial prefactor treats xk.
///   Floored:    log C(k, floor(xk)) + log C(p-k, floor((1-x)k))
///   Continuous: the same with real arguments via log-gamma
/// Continuous mode matters when k is tiny (k = floor(n^alpha) is 1 at alpha = 0.01
/// for any practical n) and the floored prefactor is flat in x.
enum class BinomialMode { Floored, Continuous };

struct FMFParams {
  double alpha = 0.0;
  double C = 0.0;
  double a = 0.0;
  double c_r = 0.0;
  double c_s = 0.0;
  double c_i = 0.0;
  std::uint64_t k = 0;
  double M = 0.0;
  double p = 0.0;
  BinomialMode mode = BinomialMode::Floored;

  /// k = floor(n^alpha), (M, p) from deterministic_scales.
  static FMFParams from_surrogates(double n, double alpha, double C, double a,
                                   BinomialMode mode = BinomialMode::Floored);
};

/// Throws DomainError unless 0 < alpha < 1, 1 < C < 2, slacks in [0,1), M > 0,
/// p > k >= 1 and a is in the conditioning set:
/// a > 1 and log(2) C (a log a - a + 1) > alpha/(1-alpha).
void validate(const FMFParams& params);

/// log(2) C (a log a - a + 1) - alpha/(1-alpha); positive iff a is admissible (a > 1).
double a_set_margin(double alpha, double C, double a);

struct Profile {
  double r;
  double s;
};

/// r(x) = 4 2^{-x}(1 - 2^{-x}),  s(x) = 1 - 2^{x-1}.
Profile profile_fns(double x);

/// (1/M) [log-binomial prefactor at x].
double fmf_lhs(const FMFParams& params, double x);

/// (1-y) D(2a log2 x/(1-y) || r(x)) + D(y || s(x)).
double fmf_rhs(const FMFParams& params, double x, double y);

/// LHS - RHS. Throws DomainError when a KL argument leaves [0,1].
double fmf_residual(const FMFParams& params, double x, double y);

struct ConstraintFlags {
  bool r = false;      // 2a log2 x/(1-y) <= (1-c_r) r(x)
  bool s = false;      // y <= (1-c_s) s(x)
  bool exist = false;  // 2a log2 x <= (1-c_r) r(x)
  bool uni = false;    // uniqueness inequality

  bool all() const { return r && s && exist && uni; }
};

ConstraintFlags check_constraints(const FMFParams& params, double x, double y);

struct FMFPoint {
  double y;
  ConstraintFlags flags;
  double residual;
};

/// Root in y of the residual on [0, min(y_{x,1}, (1-c_s)s(x))], where
/// y_{x,1} = 1 - 2a log2 x/((1-c_r) r(x)). Absent when the existence or
/// uniqueness constraint fails at x or the bracket has no sign change.
std::optional<FMFPoint> solve_fmf(const FMFParams& params, double x);

/// Root in y of LHS = D(y || s(x)) on [0, (1-c_s) s(x)].
std::optional<double> solve_fmf_unconditional(const FMFParams& params, double x);

/// h^{-1}(log 2 - log C(p-k, k)/M) on the [0, 1/2] branch (natural-log entropy).
double y_zero(const FMFParams& params);

struct FMFCurve {
  std::vector<double> x_grid;
  std::vector<std::optional<double>> y;
  std::vector<ConstraintFlags> feasible;
  std::vector<double> residuals;  // NaN where y is absent
  std::vector<std::optional<double>> y_unconditional;  // empty unless requested

  std::string to_csv() const;
};

/// x grid {0, 1/k, ..., 1}.
std::vector<double> default_grid(std::uint64_t k);

/// Parses "lo:hi:step" into an inclusive grid.
std::vector<double> parse_grid(const std::string& text);

FMFCurve solve_curve(const FMFParams& params, const std::vector<double>& grid,
                     bool with_unconditional = false);

struct Nonmonotonicity {
  double eps1;
  double delta1;
};

/// Largest grid eps1 and the best delta1 >= 1e-6 with y(x) - y(0) >= delta1 x
/// for every grid x in (0, eps1]. Absent when the curve does not rise at 0.
std::optional<Nonmonotonicity> nonmonotonicity(const FMFCurve& curve);

/// C(k,l) C(p-k,k-l) exp(-(M-t) D(l d/(M-t) || r(l/k)) - M D(t/M || s(l/k)))
/// with d = 2 a q M, the conditional first-moment upper bound for E[Z_{t,l} | A].
double conditional_first_moment_bound(std::uint64_t k, std::uint64_t l, std::uint64_t p,
                                      std::uint64_t M, std::uint64_t t, double a);

}  // namespace bgt
