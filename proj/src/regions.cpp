#include "bgt/regions.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "bgt/errors.hpp"
#include "bgt/mathcore.hpp"
#include "bgt/roots.hpp"

namespace bgt {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double odds(double alpha) { return alpha / (1.0 - alpha); }

void require_alpha_C(double alpha, double C, const char* op) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError(std::string(op) + ": alpha must be in (0,1)");
  if (!(C > 1.0)) throw DomainError(std::string(op) + ": C must exceed 1");
}

}  // namespace

double a_inf(double alpha, double C) {
  require_alpha_C(alpha, C, "a_inf");
  const double target = odds(alpha);
  auto g = [&](double a) { return kLn2 * C * (a * std::log(a) - a + 1.0) - target; };
  double hi = 2.0;
  while (g(hi) <= 0.0) hi *= 2.0;
  return roots::bisect(g, 1.0, hi, 1e-15, 400).x;
}

bool check_fmf_exists(double alpha, double C, double a, double c_r, double c_i) {
  (void)alpha;
  const double half_ratio = a / (2.0 * (1.0 - c_r));
  if (!(half_ratio < 1.0)) return false;
  return kl_div(1.0 - half_ratio, 0.5) <= (1.0 - c_i) * (2.0 - C) / C * kLn2;
}

double der0_denominator(double C, double a) {
  const double H = h_c(C);
  return a * (1.0 - std::log(a / (2.0 * (1.0 - H)))) + H - 1.0;
}

bool check_der0(double alpha, double C, double a) {
  const double den = der0_denominator(C, a);
  if (!(den > 0.0)) return false;
  return C < (1.0 - odds(alpha)) / den;
}

bool check_alphaC(double alpha, double C) {
  if (!(alpha < 0.028)) return false;
  if (!(C < 2.0 * (1.0 - 2.0 * alpha) / (1.0 - alpha))) return false;
  const double H = h_c(C);
  const double h2 = binary_entropy(H);
  const double root = std::sqrt(odds(alpha));
  const double L = std::log(2.0 * (1.0 - H));
  const double first = C * ((1.0 - H) * (1.0 - L) - h2 / 2.0 - 7.0 * root * (0.5 * L));
  if (!(first > 4.0 * odds(alpha))) return false;
  const double second =
      C * (h2 / 2.0 + 0.5 * std::log((1.0 - H) / H) * (1.0 - H - 5.0 * root) + H - 1.0);
  return second > 3.0 * odds(alpha);
}

CriticalC critical_c(double alpha, double tol) {
  if (!(alpha > 0.0 && alpha < 0.028)) throw DomainError("critical_c: alpha must be in (0, 0.028)");
  const double rhs = 1.0 - odds(alpha);
  auto f = [&](double C) { return C * der0_denominator(C, a_inf(alpha, C)) - rhs; };
  // f < 0 below C*, > 0 above; it dips again just below 2, so take the first crossing.
  constexpr int kScan = 400;
  double prev_c = 1.0 + 1e-6;
  double prev_f = f(prev_c);
  for (int i = 1; i <= kScan; ++i) {
    const double c = 1.0 + 1e-6 + (1.0 - 2e-6) * i / kScan;
    const double fc = f(c);
    if (prev_f < 0.0 && fc >= 0.0) {
      const auto r = roots::brent(f, prev_c, c, tol);
      return {r.x, r.fx};
    }
    prev_c = c;
    prev_f = fc;
  }
  throw NumericalFailure("critical_c: no root in (1,2)");
}

std::string RegionReport::to_csv() const {
  std::string out = "alpha,C,a,fmf_exists,der0,alphaC,all_ok\n";
  char buf[160];
  for (const auto& g : grid) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d,%d,%d,%d\n", g.alpha, g.C, g.a_used,
                  g.fmf_exists_ok, g.der0_ok, g.alphaC_ok, g.all_ok);
    out += buf;
  }
  return out;
}

RegionReport region_scan(double alpha_lo, double alpha_hi, std::size_t n_alpha, double C_lo,
                         double C_hi, std::size_t n_C, unsigned threads) {
  if (n_alpha == 0 || n_C == 0) throw DomainError("region_scan: empty grid");
  if (!(alpha_lo > 0.0 && alpha_hi < 1.0 && alpha_lo <= alpha_hi)) {
    throw DomainError("region_scan: alpha range must lie in (0,1)");
  }
  if (!(C_lo > 1.0 && C_hi < 2.0 && C_lo <= C_hi)) throw DomainError("region_scan: C range must lie in (1,2)");
  auto at = [](double lo, double hi, std::size_t n, std::size_t i) {
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  RegionReport rep;
  rep.grid.resize(n_alpha * n_C);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < rep.grid.size(); idx = next++) {
      const double alpha = at(alpha_lo, alpha_hi, n_alpha, idx / n_C);
      const double C = at(C_lo, C_hi, n_C, idx % n_C);
      RegionPoint& pt = rep.grid[idx];
      pt.alpha = alpha;
      pt.C = C;
      pt.a_used = a_inf(alpha, C) + 1e-9;
      pt.fmf_exists_ok = check_fmf_exists(alpha, C, pt.a_used);
      pt.der0_ok = check_der0(alpha, C, pt.a_used);
      pt.alphaC_ok = check_alphaC(alpha, C);
      pt.all_ok = pt.fmf_exists_ok && pt.der0_ok && pt.alphaC_ok;
    }
  };
  const unsigned nt = std::max(1u, threads);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rep;
}

}  // namespace bgt
