#include "bgt/gfunc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "bgt/errors.hpp"
#include "bgt/mathcore.hpp"

namespace bgt {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_y(double y) {
  if (!(y > 0.0 && y < 0.5)) throw DomainError("gfunc: y must be in (0, 1/2)");
}

void require_x(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("gfunc: x must be in (0, 1)");
}

// Everything in G except the x/2 D(.||1/2) term.
double g_common(double y, double yp, double x) {
  require_x(x);
  if (!(y > 0.0 && y < 1.0)) throw DomainError("gfunc: y must be in (0,1)");
  if (!(yp >= y && yp <= 1.0)) throw DomainError("gfunc: y' must be in [y, 1]");
  return yp * kl_div(y / yp, std::exp2(-(1.0 - x))) - kl_div(y, 0.5) +
         0.5 * kl_div(yp, std::exp2(-x));
}

}  // namespace

double g_tilde(double C, double y, double yp, double x) {
  return 0.5 * x * kl_div(h_c(C), 0.5) + g_common(y, yp, x);
}

double g_fn(double y, double yp, double x) { return 0.5 * x * kl_div(y, 0.5) + g_common(y, yp, x); }

double y_of_x(double y, double x) {
  // 2^{1-x} - 1 = 1 + 2 expm1(-x log 2)
  return y + (1.0 - y) * (1.0 + 2.0 * std::expm1(-x * kLn2));
}

double g_breve(double y, double x) {
  require_y(y);
  return g_fn(y, y_of_x(y, x), x);
}

DxLimits g_breve_dx_limits(double y) {
  require_y(y);
  const double h2 = binary_entropy(y);
  const double d0 = kLn2 * ((1.0 - y) * (1.0 - std::log(2.0 - 2.0 * y)) - h2 / 2.0);
  const double d1 = kLn2 * ((1.0 - y) * (1.0 + 0.5 * std::log(y / (1.0 - y))) - h2 / 2.0);
  return {d0, d1};
}

double g_dyp_at_center(double y, double x) {
  require_y(y);
  require_x(x);
  const double yx = y_of_x(y, x);
  const double two_mx = std::exp2(-x);
  return std::log((1.0 - y / yx) / (1.0 - std::exp2(-(1.0 - x)))) +
         0.5 * std::log(yx / (1.0 - yx) * (1.0 - two_mx) / two_mx);
}

std::string GReport::to_csv() const {
  std::string out = "x,g_breve,second_diff\n";
  char buf[128];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::isnan(second_differences[i])) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,\n", grid[i], breve_values[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", grid[i], breve_values[i],
                    second_differences[i]);
    }
    out += buf;
  }
  return out;
}

std::string GReport::to_json() const {
  nlohmann::json j;
  j["y"] = y;
  j["grid_points"] = grid.size();
  j["min_interior_value"] = min_interior_value;
  j["endpoint_value_0"] = endpoint_value_0;
  j["endpoint_value_1"] = endpoint_value_1;
  j["d0_limit"] = d0_limit;
  j["d1_limit"] = d1_limit;
  j["d0_fd"] = d0_fd;
  j["d1_fd"] = d1_fd;
  j["deriv_bound_sup"] = deriv_bound_sup;
  j["deriv_bound_inf"] = deriv_bound_inf;
  j["concave"] = concave;
  j["positive"] = positive;
  j["endpoints_vanish"] = endpoints_vanish;
  j["derivative_limits_match"] = derivative_limits_match;
  j["derprime_bounds"] = derprime_bounds;
  j["passed"] = passed;
  j["failures"] = failures;
  return j.dump(2);
}

GReport verify_g_properties(double y, const GOptions& o) {
  require_y(y);
  if (o.grid_points < 3 || !(o.grid_lo > 0.0 && o.grid_lo < 0.5)) {
    throw DomainError("verify_g_properties: need >= 3 grid points inside (0,1)");
  }
  GReport r;
  r.y = y;
  char buf[160];
  auto fail = [&](const char* what, double x, double v) {
    std::snprintf(buf, sizeof buf, "%s at x=%.12g (value %.12g)", what, x, v);
    r.failures.emplace_back(buf);
  };

  const double h = (1.0 - 2.0 * o.grid_lo) / static_cast<double>(o.grid_points - 1);
  for (std::size_t i = 0; i < o.grid_points; ++i) {
    const double x = i + 1 == o.grid_points ? 1.0 - o.grid_lo : o.grid_lo + h * static_cast<double>(i);
    r.grid.push_back(x);
    r.breve_values.push_back(g_breve(y, x));
  }

  r.concave = true;
  r.second_differences.assign(r.grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < r.grid.size(); ++i) {
    const double sd = r.breve_values[i - 1] + r.breve_values[i + 1] - 2.0 * r.breve_values[i];
    r.second_differences[i] = sd;
    if (!(sd <= o.concavity_slack) && r.concave) {
      r.concave = false;
      fail("second difference not negative", r.grid[i], sd);
    }
  }

  r.min_interior_value = *std::min_element(r.breve_values.begin(), r.breve_values.end());
  r.positive = r.min_interior_value > 0.0;
  if (!r.positive) {
    const auto it = std::min_element(r.breve_values.begin(), r.breve_values.end());
    fail("G-breve not positive", r.grid[it - r.breve_values.begin()], *it);
  }

  r.endpoint_value_0 = g_breve(y, o.endpoint);
  r.endpoint_value_1 = g_breve(y, 1.0 - o.endpoint);
  r.endpoints_vanish = std::abs(r.endpoint_value_0) < o.limit_tol && std::abs(r.endpoint_value_1) < o.limit_tol;
  if (std::abs(r.endpoint_value_0) >= o.limit_tol) fail("endpoint limit", o.endpoint, r.endpoint_value_0);
  if (std::abs(r.endpoint_value_1) >= o.limit_tol) fail("endpoint limit", 1.0 - o.endpoint, r.endpoint_value_1);

  const auto lim = g_breve_dx_limits(y);
  r.d0_limit = lim.d0;
  r.d1_limit = lim.d1;
  const double fh = o.fd_x / 10.0;
  auto fd = [&](double x) { return (g_breve(y, x + fh) - g_breve(y, x - fh)) / (2.0 * fh); };
  r.d0_fd = fd(o.fd_x);
  r.d1_fd = fd(1.0 - o.fd_x);
  const bool ok0 = std::abs(r.d0_fd - r.d0_limit) <= o.fd_tol;
  const bool ok1 = std::abs(r.d1_fd - r.d1_limit) <= o.fd_tol;
  r.derivative_limits_match = ok0 && ok1;
  if (!ok0) fail("derivative limit d0 mismatch", o.fd_x, r.d0_fd - r.d0_limit);
  if (!ok1) fail("derivative limit d1 mismatch", 1.0 - o.fd_x, r.d1_fd - r.d1_limit);

  r.deriv_bound_inf = 0.5 * std::log(2.0 * (1.0 - y));
  r.deriv_bound_sup = 0.5 * std::log((1.0 - y) / y);
  r.derprime_bounds = true;
  constexpr double kBoundSlack = 1e-12;
  for (double x : r.grid) {
    const double v = std::abs(g_dyp_at_center(y, x));
    const double fixed = r.deriv_bound_inf + x * std::log(4.0) / (std::exp2(2.0 - x) - 2.0);
    if (v < r.deriv_bound_inf - kBoundSlack || v > r.deriv_bound_sup + kBoundSlack ||
        v > fixed + kBoundSlack) {
      if (r.derprime_bounds) fail("derivative in y' outside its bounds", x, v);
      r.derprime_bounds = false;
    }
  }

  r.passed = r.concave && r.positive && r.endpoints_vanish && r.derivative_limits_match && r.derprime_bounds;
  return r;
}

}  // namespace bgt
