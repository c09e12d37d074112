#include "bgt/fmf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "bgt/errors.hpp"
#include "bgt/mathcore.hpp"
#include "bgt/model.hpp"
#include "bgt/roots.hpp"

namespace bgt {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kFloorGuard = 1e-9;
constexpr double kYTol = 1e-14;

double rounded_p(const FMFParams& pr) { return std::round(pr.p); }

// 2a log2 x / ((1-c_r) r(x)), with its x -> 0 limit a / (2(1-c_r)).
double ratio(const FMFParams& pr, double x) {
  if (x == 0.0) return pr.a / (2.0 * (1.0 - pr.c_r));
  return 2.0 * pr.a * kLn2 * x / ((1.0 - pr.c_r) * profile_fns(x).r);
}

void require_x(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("fmf: x outside [0,1]");
}

}  // namespace

double a_set_margin(double alpha, double C, double a) {
  return kLn2 * C * (a * std::log(a) - a + 1.0) - alpha / (1.0 - alpha);
}

FMFParams FMFParams::from_surrogates(double n, double alpha, double C, double a, BinomialMode mode) {
  const auto nn = static_cast<std::uint64_t>(std::llround(n));
  FMFParams p;
  p.alpha = alpha;
  p.C = C;
  p.a = a;
  p.k = infected_count(nn, alpha);
  const auto sc = deterministic_scales(nn, p.k, C);
  p.M = sc.M_det;
  p.p = sc.p_det;
  p.mode = mode;
  return p;
}

void validate(const FMFParams& pr) {
  if (!(pr.alpha > 0.0 && pr.alpha < 1.0)) throw DomainError("fmf: alpha must be in (0,1)");
  if (!(pr.C > 1.0 && pr.C < 2.0)) throw DomainError("fmf: C must be in (1,2)");
  for (double c : {pr.c_r, pr.c_s, pr.c_i}) {
    if (!(c >= 0.0 && c < 1.0)) throw DomainError("fmf: slack constants must be in [0,1)");
  }
  if (!(pr.M > 0.0)) throw DomainError("fmf: M must be positive");
  if (pr.k < 1) throw DomainError("fmf: k must be >= 1");
  if (!(rounded_p(pr) > static_cast<double>(pr.k))) throw DomainError("fmf: need p > k");
  if (!(pr.a > 1.0) || !(a_set_margin(pr.alpha, pr.C, pr.a) > 0.0)) {
    throw DomainError("fmf: a is not in the conditioning set for (alpha, C)");
  }
}

Profile profile_fns(double x) {
  require_x(x);
  const double t = std::exp2(-x);
  return {4.0 * t * (1.0 - t), 1.0 - std::exp2(x - 1.0)};
}

double fmf_lhs(const FMFParams& pr, double x) {
  require_x(x);
  const double kd = static_cast<double>(pr.k);
  const double P = rounded_p(pr);
  double v;
  if (pr.mode == BinomialMode::Floored) {
    const auto l = static_cast<std::uint64_t>(std::floor(x * kd + kFloorGuard));
    const auto m = static_cast<std::uint64_t>(std::floor((1.0 - x) * kd + kFloorGuard));
    v = log_binom(pr.k, std::min(l, pr.k)) +
        log_binom(static_cast<std::uint64_t>(P) - pr.k, m);
  } else {
    v = log_binom_real(kd, x * kd) + log_binom_real(P - kd, (1.0 - x) * kd);
  }
  return v / pr.M;
}

double fmf_rhs(const FMFParams& pr, double x, double y) {
  require_x(x);
  if (!(y >= 0.0 && y < 1.0)) throw DomainError("fmf: y outside [0,1)");
  const auto [r, s] = profile_fns(x);
  const double arg = 2.0 * pr.a * kLn2 * x / (1.0 - y);
  if (arg > 1.0) throw DomainError("fmf: infeasible point, KL argument exceeds 1");
  return (1.0 - y) * kl_div(arg, r) + kl_div(y, s);
}

double fmf_residual(const FMFParams& pr, double x, double y) {
  return fmf_lhs(pr, x) - fmf_rhs(pr, x, y);
}

ConstraintFlags check_constraints(const FMFParams& pr, double x, double y) {
  require_x(x);
  const auto [r, s] = profile_fns(x);
  const double lin = 2.0 * pr.a * kLn2 * x;
  ConstraintFlags f;
  f.r = y < 1.0 && lin / (1.0 - y) <= (1.0 - pr.c_r) * r;
  f.s = y <= (1.0 - pr.c_s) * s;
  f.exist = lin <= (1.0 - pr.c_r) * r;
  const double rho = ratio(pr, x);
  if (rho <= 1.0) {
    const double lhs = kl_div(1.0 - rho, s) + rho * kl_div((1.0 - pr.c_r) * r, r);
    f.uni = lhs <= (1.0 - pr.c_i) * (1.0 - x) * (2.0 - pr.C) * kLn2 / pr.C;
  }
  return f;
}

std::optional<FMFPoint> solve_fmf(const FMFParams& pr, double x) {
  const auto pre = check_constraints(pr, x, 0.0);
  if (!pre.exist || !pre.uni) return std::nullopt;
  const double hi = std::min(1.0 - ratio(pr, x), (1.0 - pr.c_s) * profile_fns(x).s);
  if (!(hi > 0.0)) return std::nullopt;
  auto f = [&](double y) { return fmf_residual(pr, x, y); };
  double y;
  try {
    y = roots::bisect(f, 0.0, hi, kYTol, 400).x;
  } catch (const NumericalFailure&) {
    return std::nullopt;
  }
  return FMFPoint{y, check_constraints(pr, x, y), std::abs(f(y))};
}

std::optional<double> solve_fmf_unconditional(const FMFParams& pr, double x) {
  const double lhs = fmf_lhs(pr, x);
  const double s = profile_fns(x).s;
  const double hi = (1.0 - pr.c_s) * s;
  if (!(hi > 0.0)) return std::nullopt;
  auto f = [&](double y) { return lhs - kl_div(y, s); };
  try {
    return roots::bisect(f, 0.0, hi, kYTol, 400).x;
  } catch (const NumericalFailure&) {
    return std::nullopt;
  }
}

double y_zero(const FMFParams& pr) {
  const double v = kLn2 - fmf_lhs(pr, 0.0);
  if (!(v >= 0.0 && v <= kLn2)) throw DomainError("y_zero: log C(p-k,k)/M outside [0, log 2]");
  return entropy_nats_inv_left(v);
}

std::string FMFCurve::to_csv() const {
  const bool unc = !y_unconditional.empty();
  std::string out = "x,y,feasible_r,feasible_s,feasible_exist,feasible_uni,residual";
  out += unc ? ",y_unconditional\n" : "\n";
  char buf[96];
  auto num = [&](std::optional<double> v) -> std::string {
    if (!v) return "";
    std::snprintf(buf, sizeof buf, "%.12g", *v);
    return buf;
  };
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const auto& f = feasible[i];
    out += num(x_grid[i]) + "," + num(y[i]) + "," + (f.r ? "1" : "0") + "," + (f.s ? "1" : "0") +
           "," + (f.exist ? "1" : "0") + "," + (f.uni ? "1" : "0") + "," +
           (y[i] ? num(residuals[i]) : std::string());
    if (unc) out += "," + num(y_unconditional[i]);
    out += "\n";
  }
  return out;
}

std::vector<double> default_grid(std::uint64_t k) {
  if (k == 0) throw DomainError("default_grid: k must be >= 1");
  std::vector<double> g;
  for (std::uint64_t l = 0; l <= k; ++l) g.push_back(static_cast<double>(l) / static_cast<double>(k));
  return g;
}

std::vector<double> parse_grid(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
    throw DomainError("grid must look like lo:hi:step");
  }
  double lo, hi, step;
  try {
    lo = std::stod(a);
    hi = std::stod(b);
    step = std::stod(c);
  } catch (const std::exception&) {
    throw DomainError("grid must look like lo:hi:step");
  }
  if (!(step > 0.0) || !(hi >= lo) || lo < 0.0 || hi > 1.0) throw DomainError("grid: bad range");
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

FMFCurve solve_curve(const FMFParams& pr, const std::vector<double>& grid, bool with_unconditional) {
  validate(pr);
  FMFCurve c;
  c.x_grid = grid;
  for (double x : grid) {
    const auto pt = solve_fmf(pr, x);
    if (pt) {
      c.y.push_back(pt->y);
      c.feasible.push_back(pt->flags);
      c.residuals.push_back(pt->residual);
    } else {
      c.y.push_back(std::nullopt);
      auto f = check_constraints(pr, x, 0.0);
      f.r = f.s = false;
      c.feasible.push_back(f);
      c.residuals.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    if (with_unconditional) c.y_unconditional.push_back(solve_fmf_unconditional(pr, x));
  }
  return c;
}

std::optional<Nonmonotonicity> nonmonotonicity(const FMFCurve& curve) {
  constexpr double kMinSlope = 1e-6;
  std::optional<double> y0;
  for (std::size_t i = 0; i < curve.x_grid.size(); ++i) {
    if (curve.x_grid[i] == 0.0) y0 = curve.y[i];
  }
  if (!y0) return std::nullopt;
  std::vector<std::size_t> order(curve.x_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return curve.x_grid[a] < curve.x_grid[b]; });
  std::optional<Nonmonotonicity> best;
  double run_min = std::numeric_limits<double>::infinity();
  for (auto i : order) {
    const double x = curve.x_grid[i];
    if (x <= 0.0) continue;
    if (!curve.y[i]) break;
    run_min = std::min(run_min, (*curve.y[i] - *y0) / x);
    if (run_min < kMinSlope) break;
    best = Nonmonotonicity{x, run_min};
  }
  return best;
}

double conditional_first_moment_bound(std::uint64_t k, std::uint64_t l, std::uint64_t p,
                                      std::uint64_t M, std::uint64_t t, double a) {
  if (l > k || p < k || t >= M) throw DomainError("first moment bound: bad arguments");
  const double x = static_cast<double>(l) / static_cast<double>(k);
  const auto [r, s] = profile_fns(x);
  const double d = 2.0 * a * assignment_prob(k) * static_cast<double>(M);
  const double Mt = static_cast<double>(M - t);
  const double arg = std::min(1.0, static_cast<double>(l) * d / Mt);
  const double e = log_binom(k, l) + log_binom(p - k, k - l) - Mt * kl_div(arg, r) -
                   static_cast<double>(M) * kl_div(static_cast<double>(t) / static_cast<double>(M), s);
  return std::exp(e);
}

}  // namespace bgt
