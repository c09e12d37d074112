#pragma once

// The second-moment exponents G~, G and G-breve, and grid certification of
// their analytic properties.

#include <string>
#include <vector>

namespace bgt {

/// x/2 D(H_C||1/2) + y' D(y/y' || 2^{-(1-x)}) - D(y||1/2) + 1/2 D(y' || 2^{-x}).
double g_tilde(double C, double y, double yp, double x);

/// x/2 D(y||1/2) + y' D(y/y' || 2^{-(1-x)}) - D(y||1/2) + 1/2 D(y' || 2^{-x}).
double g_fn(double y, double yp, double x);

/// y_(x) = y + (1-y)(2^{1-x} - 1).
double y_of_x(double y, double x);

/// G-breve(y, x) = G(y, y_(x), x).
double g_breve(double y, double x);

struct DxLimits {
  double d0;  // lim_{x->0} d/dx G-breve
  double d1;  // lim_{x->1} d/dx G-breve
};

/// d0 = log2 ((1-y)(1 - log(2-2y)) - h2(y)/2),
/// d1 = log2 ((1-y)(1 + log(y/(1-y))/2) - h2(y)/2).
DxLimits g_breve_dx_limits(double y);

/// dG/dy' at y' = y_(x):
/// log((1 - y/y_(x)) / (1 - 2^{-(1-x)})) + 1/2 log(y_(x)/(1-y_(x)) (1-2^{-x})/2^{-x}).
double g_dyp_at_center(double y, double x);

struct GOptions {
  double grid_lo = 1e-3;  // grid is [grid_lo, 1 - grid_lo]
  std::size_t grid_points = 2001;
  double endpoint = 1e-8;  // endpoint limits are evaluated here
  double limit_tol = 1e-6;
  double fd_x = 1e-6;  // finite-difference probes at fd_x and 1 - fd_x
  double fd_tol = 1e-4;
  double concavity_slack = 1e-12;
};

struct GReport {
  double y = 0.0;
  std::vector<double> grid;
  std::vector<double> breve_values;
  std::vector<double> second_differences;  // NaN at the two ends
  double min_interior_value = 0.0;
  double endpoint_value_0 = 0.0;
  double endpoint_value_1 = 0.0;
  double d0_limit = 0.0;
  double d1_limit = 0.0;
  double d0_fd = 0.0;
  double d1_fd = 0.0;
  double deriv_bound_sup = 0.0;  // 1/2 log((1-y)/y)
  double deriv_bound_inf = 0.0;  // 1/2 log(2(1-y))
  bool concave = false;
  bool positive = false;
  bool endpoints_vanish = false;
  bool derivative_limits_match = false;
  bool derprime_bounds = false;
  bool passed = false;
  std::vector<std::string> failures;  // one line per failed check, with the offending x

  std::string to_csv() const;   // x,g_breve,second_diff
  std::string to_json() const;  // summary
};

/// Throws DomainError unless 0 < y < 1/2.
GReport verify_g_properties(double y, const GOptions& opts = {});

}  // namespace bgt
