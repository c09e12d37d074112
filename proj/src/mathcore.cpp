#include "bgt/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "bgt/errors.hpp"
#include "bgt/roots.hpp"

namespace bgt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(what) + ": argument outside [0,1]");
}

// lgamma(x+1) - [(x+1/2) log x - x + log(2 pi)/2], the Stirling remainder.
double stirlerr(double x) {
  if (x < 16.0) {
    return std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x -
           0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double x2 = x * x;
  return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0) / x2) / x2) / x2) / x;
}

}  // namespace

double binary_entropy(double x) {
  require_unit(x, "binary_entropy");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double entropy_nats(double x) { return std::numbers::ln2 * binary_entropy(x); }

double entropy_inv_left(double v) {
  require_unit(v, "entropy_inv_left");
  if (v == 0.0) return 0.0;
  if (v == 1.0) return 0.5;
  auto r = roots::bisect([v](double x) { return binary_entropy(x) - v; }, 0.0, 0.5, 1e-12, 200);
  return r.x;
}

double entropy_nats_inv_left(double v) {
  if (!(v >= 0.0 && v <= std::numbers::ln2 * (1.0 + 1e-15))) {
    throw DomainError("entropy_nats_inv_left: argument outside [0, log 2]");
  }
  return entropy_inv_left(std::min(1.0, v / std::numbers::ln2));
}

double kl_div(double q1, double q2) {
  if (!(q1 >= 0.0 && q1 <= 1.0 && q2 >= 0.0 && q2 <= 1.0)) {
    throw DomainError("kl_div: arguments outside [0,1]^2");
  }
  double a = 0.0;
  if (q1 > 0.0) a = (q2 == 0.0) ? kInf : q1 * (std::log(q1) - std::log(q2));
  double b = 0.0;
  if (q1 < 1.0) b = (q2 == 1.0) ? kInf : (1.0 - q1) * (std::log1p(-q1) - std::log1p(-q2));
  const double d = a + b;
  return d < 0.0 ? 0.0 : d;
}

double h_c(double C) {
  if (!(C > 1.0 && C <= 2.0)) throw DomainError("h_c: C must lie in (1, 2]");
  return entropy_inv_left(std::clamp(2.0 - 2.0 / C, 0.0, 1.0));
}

TailBounds binom_tail_bounds(std::uint64_t n, double pr, std::uint64_t k, TailSide side) {
  if (n == 0) throw DomainError("binom_tail_bounds: n must be positive");
  if (!(pr > 0.0 && pr < 1.0)) throw DomainError("binom_tail_bounds: pr must lie in (0,1)");
  if (k > n) throw DomainError("binom_tail_bounds: k must lie in [0, n]");
  const double nd = static_cast<double>(n);
  const double frac = static_cast<double>(k) / nd;
  const double expo = std::exp(-nd * kl_div(frac, pr));
  const bool far_side = side == TailSide::LowerTail ? frac <= pr : frac >= pr;
  return {expo / (3.0 * std::sqrt(nd)), far_side ? expo : 1.0};
}

double binom_tail_exact(std::uint64_t n, double pr, std::uint64_t k, TailSide side) {
  if (n == 0 || n > 10000) throw DomainError("binom_tail_exact: n must lie in [1, 10^4]");
  if (!(pr > 0.0 && pr < 1.0)) throw DomainError("binom_tail_exact: pr must lie in (0,1)");
  if (k > n) throw DomainError("binom_tail_exact: k must lie in [0, n]");
  std::uint64_t lo = 0, hi = k;
  if (side == TailSide::UpperTail) {
    lo = k;
    hi = n;
  }
  const double lp = std::log(pr);
  const double lq = std::log1p(-pr);
  std::vector<double> terms;
  terms.reserve(hi - lo + 1);
  double mx = -kInf;
  for (std::uint64_t i = lo; i <= hi; ++i) {
    const double t = log_binom(n, i) + static_cast<double>(i) * lp + static_cast<double>(n - i) * lq;
    terms.push_back(t);
    mx = std::max(mx, t);
  }
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - mx);
  return std::min(1.0, std::exp(mx) * acc);
}

double log_binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw DomainError("log_binom: k > n");
  const std::uint64_t m = std::min(k, n - k);
  if (m == 0) return 0.0;
  if (m <= 64) {
    // sum_{i<m} log((n-i)/(i+1)), exact to a few ulps per term
    double acc = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) {
      acc += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1));
    }
    return acc;
  }
  return log_binom_real(static_cast<double>(n), static_cast<double>(k));
}

double log_binom_real(double n, double k) {
  if (!(k >= 0.0 && k <= n)) throw DomainError("log_binom_real: need 0 <= k <= n");
  const double r = n - k;
  if (k == 0.0 || r == 0.0) return 0.0;
  // Stirling split: the large terms k log(n/k) + r log(n/r) are formed without
  // cancellation; the remainders carry the small corrections.
  return k * std::log(n / k) - r * std::log1p(-k / n) +
         0.5 * std::log(n / (2.0 * std::numbers::pi * k * r)) + stirlerr(n) - stirlerr(k) -
         stirlerr(r);
}

}  // namespace bgt
