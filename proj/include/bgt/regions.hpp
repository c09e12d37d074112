#pragma once

// Parameter-region checks over the (alpha, C) plane and the critical constant C*.

#include <string>
#include <vector>

namespace bgt {

/// inf{a > 1 : log(2) C (a log a - a + 1) > alpha/(1-alpha)}, the root of the
/// equality (the left side is 0 at a = 1 and increasing beyond).
double a_inf(double alpha, double C);

/// D(1 - a/(2(1-c_r)) || 1/2) <= (1-c_i)(2-C)/C log 2  and  a/(2(1-c_r)) < 1.
bool check_fmf_exists(double alpha, double C, double a, double c_r = 0.0, double c_i = 0.0);

/// a(1 - log(a/(2(1-H_C)))) + H_C - 1, the denominator of the derivative condition.
double der0_denominator(double C, double a);

/// C < (1 - alpha/(1-alpha)) / der0_denominator(C, a); false if the denominator is <= 0.
bool check_der0(double alpha, double C, double a);

/// The four (alpha, C) conditions: alpha < 0.028, C < 2(1-2alpha)/(1-alpha), and
/// the two second-moment inequalities in H_C.
bool check_alphaC(double alpha, double C);

struct CriticalC {
  double C;
  double residual;
};

/// Root in C of C der0_denominator(C, a_inf(alpha, C)) = 1 - alpha/(1-alpha):
/// the first sign change on a scan of (1, 2), refined by Brent.
/// Throws NumericalFailure when there is none.
CriticalC critical_c(double alpha, double tol = 1e-12);

struct RegionPoint {
  double alpha;
  double C;
  double a_used;
  bool fmf_exists_ok;
  bool der0_ok;
  bool alphaC_ok;
  bool all_ok;
};

struct RegionReport {
  std::vector<RegionPoint> grid;
  std::string to_csv() const;  // alpha,C,a,fmf_exists,der0,alphaC,all_ok
};

/// Evaluates the three checks on a n_alpha x n_C grid (inclusive endpoints)
/// with a = a_inf + 1e-9. Rows are ordered alpha-major.
RegionReport region_scan(double alpha_lo, double alpha_hi, std::size_t n_alpha, double C_lo,
                         double C_hi, std::size_t n_C, unsigned threads = 1);

}  // namespace bgt
