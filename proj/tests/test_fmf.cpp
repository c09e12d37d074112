#include "doctest.h"

#include <cmath>

#include "bgt/errors.hpp"
#include "bgt/fmf.hpp"
#include "bgt/mathcore.hpp"
#include "bgt/regions.hpp"

using namespace bgt;

namespace {

FMFParams figure_params(double n, double C) {
  return FMFParams::from_surrogates(n, 0.01, C, 1.17, BinomialMode::Continuous);
}

}  // namespace

TEST_CASE("profile functions") {
  auto p0 = profile_fns(0.0);
  CHECK(p0.r == 0.0);
  CHECK(p0.s == 0.5);
  auto p1 = profile_fns(1.0);
  CHECK(p1.r == 0.0 + 1.0);
  CHECK(p1.s == 0.0);
  auto ph = profile_fns(0.5);
  CHECK(ph.r == doctest::Approx(0.8284271247461901).epsilon(1e-14));
  CHECK(ph.s == doctest::Approx(0.2928932188134525).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  auto ok = FMFParams::from_surrogates(1e8, 0.1, 1.2, a_inf(0.1, 1.2) + 1e-3);
  CHECK_NOTHROW(validate(ok));
  auto bad = ok;
  bad.C = 2.0;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ok;
  bad.a = 1.0;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = ok;
  bad.c_r = 1.0;
  CHECK_THROWS_AS(validate(bad), DomainError);
  CHECK(a_set_margin(0.01, 1.2, a_inf(0.01, 1.2)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("residual at the origin and monotonicity in y") {
  auto pr = FMFParams::from_surrogates(1e12, 0.1, 1.3, a_inf(0.1, 1.3) + 1e-3);
  validate(pr);
  const double lhs0 = log_binom(static_cast<std::uint64_t>(std::round(pr.p)) - pr.k, pr.k) / pr.M;
  CHECK(fmf_lhs(pr, 0.0) == doctest::Approx(lhs0).epsilon(1e-13));
  CHECK(fmf_residual(pr, 0.0, 0.0) == doctest::Approx(lhs0 - std::log(2.0)).epsilon(1e-13));

  for (double x : {0.0, 0.1, 0.2}) {
    double prev = -INFINITY;
    for (int i = 0; i <= 40; ++i) {
      const double y = 0.005 * i;
      if (!check_constraints(pr, x, y).r || !check_constraints(pr, x, y).s) break;
      const double r = fmf_residual(pr, x, y);
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("constraint flags") {
  auto pr = FMFParams::from_surrogates(1e12, 0.1, 1.3, a_inf(0.1, 1.3) + 1e-3);
  auto f0 = check_constraints(pr, 0.0, 0.1);
  CHECK(f0.r);
  CHECK(f0.s);
  CHECK(f0.exist);
  // The uniqueness check at x = 0 reduces to D(1 - a/2 || 1/2) <= (2-C)/C log 2.
  const bool reduced = kl_div(1.0 - pr.a / 2.0, 0.5) <= (2.0 - pr.C) / pr.C * std::log(2.0);
  CHECK(f0.uni == reduced);
  CHECK_FALSE(check_constraints(pr, 1.0, 0.0).exist);
  CHECK_FALSE(check_constraints(pr, 0.3, profile_fns(0.3).s + 0.01).s);
}

TEST_CASE("solutions at x = 0 agree across methods") {
  for (double n : {1e8, 1e10, 1e12}) {
    for (double C : {1.2, 1.4}) {
      auto pr = FMFParams::from_surrogates(n, 0.1, C, a_inf(0.1, C) + 1e-4);
      auto pt = solve_fmf(pr, 0.0);
      REQUIRE(pt.has_value());
      CHECK(pt->flags.all());
      CHECK(std::abs(pt->residual) <= 1e-10);
      auto un = solve_fmf_unconditional(pr, 0.0);
      REQUIRE(un.has_value());
      CHECK(std::abs(pt->y - y_zero(pr)) < 1e-9);
      CHECK(std::abs(*un - pt->y) < 1e-9);
    }
  }
}

TEST_CASE("y_zero tends to H_C") {
  auto pr = FMFParams::from_surrogates(1e8, 0.01, 1.3, 1.2);
  CHECK(std::abs(y_zero(pr) - h_c(1.3)) <= 0.05);
  for (double C : {1.2, 1.4}) {
    auto small = FMFParams::from_surrogates(1e8, 0.1, C, 1.2);
    auto large = FMFParams::from_surrogates(1e12, 0.1, C, 1.2);
    CHECK(std::abs(y_zero(large) - h_c(C)) < std::abs(y_zero(small) - h_c(C)));
  }
  // Many tests relative to the prefactor push the root to 1/2.
  auto huge = pr;
  huge.M = 1e15;
  CHECK(y_zero(huge) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("conditional and unconditional curves") {
  auto pr = figure_params(1e12, 1.1);
  auto curve = solve_curve(pr, parse_grid("0:0.15:0.005"), true);
  REQUIRE(curve.y_unconditional.size() == curve.x_grid.size());
  for (std::size_t i = 0; i < curve.x_grid.size(); ++i) {
    if (curve.y[i]) {
      CHECK(std::abs(curve.residuals[i]) <= 1e-10);
      CHECK(curve.feasible[i].all());
      if (curve.y_unconditional[i]) CHECK(*curve.y[i] >= *curve.y_unconditional[i] - 1e-12);
    }
  }
  CHECK(*curve.y[0] == doctest::Approx(*curve.y_unconditional[0]).epsilon(1e-12));
  auto nm = nonmonotonicity(curve);
  REQUIRE(nm.has_value());
  CHECK(nm->eps1 > 0.0);
  CHECK(nm->delta1 > 0.0);
  CHECK_FALSE(nonmonotonicity(solve_curve(figure_params(1e12, 1.3), parse_grid("0:0.15:0.005")))
                  .has_value());
}

TEST_CASE("nonmonotonicity on constructed curves") {
  FMFCurve c;
  c.x_grid = default_grid(10);
  CHECK(c.x_grid.size() == 11);
  for (double x : c.x_grid) c.y.push_back(0.1 + 0.3 * x);
  auto nm = nonmonotonicity(c);
  REQUIRE(nm.has_value());
  CHECK(nm->eps1 == doctest::Approx(1.0));
  CHECK(nm->delta1 == doctest::Approx(0.3));

  FMFCurve d;
  d.x_grid = default_grid(10);
  for (double x : d.x_grid) d.y.push_back(0.4 - 0.2 * x);
  CHECK_FALSE(nonmonotonicity(d).has_value());
}

TEST_CASE("derivative-condition region gives a rising curve") {
  const double a = a_inf(0.005, 1.2) + 1e-6;
  auto pr = FMFParams::from_surrogates(1e10, 0.005, 1.2, a, BinomialMode::Continuous);
  auto curve = solve_curve(pr, parse_grid("0:0.1:0.002"));
  auto nm = nonmonotonicity(curve);
  REQUIRE(nm.has_value());
  CHECK(nm->delta1 > 0.0);
}

TEST_CASE("grid parsing") {
  auto g = parse_grid("0:0.2:0.05");
  REQUIRE(g.size() == 5);
  CHECK(g.back() == doctest::Approx(0.2));
  CHECK_THROWS_AS(parse_grid("0:0.2"), DomainError);
  CHECK_THROWS_AS(parse_grid("0.5:0.2:0.1"), DomainError);
}

TEST_CASE("first moment bound") {
  // t = M is rejected; the bound is a finite positive number in the interior.
  CHECK_THROWS_AS(conditional_first_moment_bound(4, 1, 40, 30, 30, 1.2), DomainError);
  const double b = conditional_first_moment_bound(4, 1, 40, 30, 5, 1.2);
  CHECK(std::isfinite(b));
  CHECK(b >= 0.0);
}
