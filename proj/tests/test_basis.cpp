#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "pmaass/arith.hpp"
#include "pmaass/basis.hpp"
#include "pmaass/errors.hpp"
#include "pmaass/kloosterman.hpp"
#include "pmaass/numeric.hpp"
#include "pmaass/poincare_series.hpp"
#include "pmaass/special_functions.hpp"

using namespace pmaass;

namespace {

// Power-series helpers on q-coefficient vectors (index = exponent).
std::vector<double> series_mul(const std::vector<double>& a,
                               const std::vector<double>& b, std::size_t len) {
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < len && i < a.size(); ++i)
    for (std::size_t j = 0; i + j < len && j < b.size(); ++j)
      out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> series_inv(const std::vector<double>& a, std::size_t len) {
  std::vector<double> out(len, 0.0);
  out[0] = 1.0 / a[0];
  for (std::size_t i = 1; i < len; ++i) {
    double s = 0.0;
    for (std::size_t j = 1; j <= i && j < a.size(); ++j)
      s += a[j] * out[i - j];
    out[i] = -s / a[0];
  }
  return out;
}

double sigma_pow(long n, int k) {
  double s = 0.0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) s += std::pow(static_cast<double>(d), k);
  return s;
}

// Coefficients of q * j(z) = E_4^3 / (Delta / q), so jq[i] holds the
// q^{i-1} coefficient of the modular j function.
std::vector<double> j_series(std::size_t len) {
  std::vector<double> e4(len, 0.0), dq(len, 0.0);
  e4[0] = 1.0;
  for (std::size_t n = 1; n < len; ++n) e4[n] = 240.0 * sigma_pow(n, 3);
  dq[0] = 1.0;
  for (std::size_t n = 1; n < len; ++n) {
    // multiply by (1 - q^n)^24 via the binomial expansion
    std::vector<double> f(len, 0.0);
    double bin = 1.0;
    for (std::size_t t = 0; t * n < len; ++t) {
      f[t * n] = bin;
      bin *= -(24.0 - t) / (t + 1.0);
    }
    dq = series_mul(dq, f, len);
  }
  std::vector<double> cube = series_mul(series_mul(e4, e4, len), e4, len);
  return series_mul(cube, series_inv(dq, len), len);
}

}  // namespace

TEST_CASE("cusp series recovers the modular j function coefficients") {
  std::vector<double> jq = j_series(5);
  CHECK(jq[0] == doctest::Approx(1.0));
  CHECK(jq[1] == doctest::Approx(744.0));
  CHECK(jq[2] == doctest::Approx(196884.0));
  CHECK(jq[3] == doctest::Approx(21493760.0));

  GroupData gd = group_data(1);
  FourierExpansion fe =
      maass_poincare_coeffs(1, gd.cusp_infinity(), -1, 0, 2, 3000, 2);
  CHECK(fe.hol.at(-1) == 1.0);
  CHECK(std::abs(fe.hol.at(1) - 196884.0) < 25.0);
  CHECK(std::abs(fe.hol.at(2) - 21493760.0) < 80.0);
  CHECK(fe.hol_tail.at(1) > 0.0);
}

TEST_CASE("cusp series constant term matches the divisor closed form") {
  // 4 pi^2 |n| sum_c K(n,0;c)/c^2 telescopes to 24 sigma_1(|n|); at level 11
  // the same line is an independent Euler-product evaluation.  The Moebius
  // tail of the c-sum only decays like 1/c_max, hence the loose tolerance.
  GroupData gd = group_data(1);
  for (long n : {-1L, -2L, -3L}) {
    FourierExpansion fe =
        maass_poincare_coeffs(1, gd.cusp_infinity(), n, 0, 0, 4000, 2);
    double target = 24.0 * static_cast<double>(sigma1(-n));
    CHECK(std::abs(fe.hol.at(0) - target) < 2e-3 * std::abs(target));
  }
  GroupData gd11 = group_data(11);
  for (long n : {-1L, -2L}) {
    FourierExpansion fe =
        maass_poincare_coeffs(11, gd11.cusp_infinity(), n, 0, 0, 4000, 2);
    cplx target = 4.0 * PI * PI * static_cast<double>(-n) *
                  ramanujan_dirichlet(11, n, cplx(2.0, 0.0));
    CHECK(std::abs(fe.hol.at(0) - target) < 2e-3 * std::abs(target));
  }
}

TEST_CASE("second order pole reproduces the Faber polynomial") {
  std::vector<double> jq = j_series(6);
  // j^2 reduced by a multiple of j until only the q^{-2} pole is left;
  // j2[i] sits at q^{i-2} while jq[i] sits at q^{i-1}.
  std::vector<double> j2 = series_mul(jq, jq, 6);
  double c1 = j2[1];  // q^{-1} coefficient of j^2
  std::vector<double> faber(5, 0.0);
  faber[0] = j2[0];
  for (std::size_t i = 1; i < 5; ++i) faber[i] = j2[i] - c1 * jq[i - 1];
  CHECK(faber[3] == doctest::Approx(42987520.0));

  GroupData gd = group_data(1);
  FourierExpansion fe =
      maass_poincare_coeffs(1, gd.cusp_infinity(), -2, 0, 1, 3000, 2);
  CHECK(fe.hol.at(-2) == 1.0);
  CHECK(fe.hol.count(-1) == 0);
  CHECK(std::abs(fe.hol.at(1) - faber[3]) < 500.0);
}

TEST_CASE("negative weight series matches the classical quotient") {
  // The weight -2 pole-at-infinity form is E_4 E_6 / Delta: S_4(1) = 0 leaves
  // no room for a nonmeromorphic correction, so even the constant must agree.
  std::vector<double> e4(4, 0.0), e6(4, 0.0), dq(4, 0.0);
  e4[0] = e6[0] = dq[0] = 1.0;
  for (std::size_t n = 1; n < 4; ++n) {
    e4[n] = 240.0 * sigma_pow(n, 3);
    e6[n] = -504.0 * sigma_pow(n, 5);
  }
  std::vector<double> num = series_mul(e4, e6, 4);
  std::vector<double> jq = j_series(4);
  std::vector<double> e43 = series_mul(series_mul(e4, e4, 4), e4, 4);
  // Delta/q = E_4^3 / (q j)
  std::vector<double> quot = series_mul(num, series_mul(series_inv(e43, 4), jq, 4), 4);
  CHECK(quot[0] == doctest::Approx(1.0));
  CHECK(quot[1] == doctest::Approx(-240.0));
  CHECK(quot[2] == doctest::Approx(-141444.0));

  GroupData gd = group_data(1);
  FourierExpansion fe =
      maass_poincare_coeffs(1, gd.cusp_infinity(), -1, -2, 1, 800, 2);
  CHECK(fe.hol.at(-1) == 1.0);
  CHECK(std::abs(fe.hol.at(0) - (-240.0)) < 0.5);
  CHECK(std::abs(fe.hol.at(1) - (-141444.0)) < 0.5);
}

TEST_CASE("cusp series keeps its pole away from other cusps") {
  GroupData gd = group_data(11);
  const Cusp* zero = nullptr;
  for (const Cusp& c : gd.cusps)
    if (!c.at_infinity) zero = &c;
  REQUIRE(zero != nullptr);
  FourierExpansion fe = maass_poincare_coeffs(11, *zero, -1, 0, 1, 400, 1);
  CHECK(fe.hol.count(-1) == 0);  // no principal part at infinity
  CHECK(std::isfinite(fe.hol.at(0).real()));
  FourierExpansion at_inf =
      maass_poincare_coeffs(11, gd.cusp_infinity(), -1, 0, 0, 400, 1);
  CHECK(at_inf.hol.at(-1) == 1.0);
}

TEST_CASE("uniformizer derivative matches finite differences") {
  cplx tau0(0.0, 1.0);
  TermSum ts;
  ts.base = tau0;
  ts.terms.push_back({cplx(1.0), 0, 1});

  TermSum d1 = d_operator(ts, tau0, 1);
  REQUIRE(d1.terms.size() == 1);
  CHECK(d1.terms[0].p == 2);
  CHECK(d1.terms[0].m == 1);
  CHECK(std::abs(d1.terms[0].coef - cplx(PI)) < 1e-15);

  auto zf_of = [&](cplx X) { return (tau0 - std::conj(tau0) * X) / (1.0 - X); };
  auto F = [&](cplx X) { return term_sum_eval(ts, zf_of(X)); };
  for (cplx X0 : {cplx(0.0, 0.0), cplx(0.1, 0.05)}) {
    double h = 1e-5;
    cplx fd = (F(X0 + h) - F(X0 - h)) / (2.0 * h);
    cplx an = term_sum_eval(d1, zf_of(X0));
    CHECK(std::abs(fd - an) / std::abs(an) < 1e-6);
  }
  TermSum d2 = d_operator(ts, tau0, 2);
  {
    cplx X0(0.1, 0.05);
    double h = 1e-4;
    cplx fd = (F(X0 + h) - 2.0 * F(X0) + F(X0 - h)) / (h * h);
    cplx an = term_sum_eval(d2, zf_of(X0));
    CHECK(std::abs(fd - an) / std::abs(an) < 1e-4);
  }

  CHECK(d_operator(ts, tau0, 0).terms.size() == 1);
  TermSum constant;
  constant.base = tau0;
  constant.terms.push_back({cplx(1.0), 0, 0});
  CHECK(d_operator(constant, tau0, 1).terms.empty());
  CHECK_THROWS_AS(d_operator(ts, cplx(0.0, 2.0), 1), invalid_input);
}

TEST_CASE("elliptic pole series matches its direct evaluation") {
  // z sits low enough that the exponentially small z-dependent rows are
  // ~1e-4, so the absolute tolerance pins them to well under a percent.
  cplx tau0(0.21, 1.2), z(0.3, 3.0);
  double v0 = tau0.imag();
  for (long N : {1L, 11L}) {
    CAPTURE(N);
    FourierExpansion fe = y_form_coeffs(N, tau0, -1, 6, 600, 1e-9, 2);
    bool in = false;
    cplx lhs = evaluate_expansion(fe, z, &in);
    CHECK(in);
    PsiEvalParams params;
    params.c_max = 400;
    params.threads = 2;
    double cN = group_data(N).c_constant.value();
    cplx rhs = 2.0 * v0 *
               (y_psi2(N, {tau0, z}, params) + PI / 3.0 * cN * e2_hat(tau0));
    CHECK(std::abs(lhs - rhs) < 1e-6);
  }
}

TEST_CASE("higher pole order obeys the operator recurrence") {
  // Y_{0,-2} equals (1/(v0 w)) d/dX applied to -(z-conj(tau0))^2/2 times the
  // scalar realization of Y_{0,-1}, differentiated numerically in zfrak.
  // The bracket is exponentially small in Im z - v0 (its zfrak-constant part
  // cancels) while each y_psi2 call carries a fixed absolute error, so the
  // difference quotient is evaluated close to the validity edge where the
  // value still dominates the amplified noise.
  auto oracle = [](long N, cplx tau0, int omega, cplx z, long c_max, double h) {
    PsiEvalParams params;
    params.c_max = c_max;
    params.threads = 2;
    double cN = group_data(N).c_constant.value();
    auto scalar = [&](cplx zf) {
      return -0.5 * (zf - std::conj(tau0)) * (zf - std::conj(tau0)) *
             (y_psi2(N, {zf, z}, params) + PI / 3.0 * cN * e2_hat(zf));
    };
    auto deriv = [&](double hh) {
      return (scalar(tau0 + hh) - scalar(tau0 - hh)) / (2.0 * hh);
    };
    cplx gp = (4.0 * deriv(h / 2.0) - deriv(h)) / 3.0;
    double v0 = tau0.imag();
    cplx dX = gp * (tau0 - std::conj(tau0)) * (tau0 - std::conj(tau0)) /
              cplx(0.0, 2.0 * v0);
    return dX / (v0 * static_cast<double>(omega));
  };
  SUBCASE("generic base point") {
    cplx tau0(0.21, 1.2), z(0.3, 3.0);
    FourierExpansion fe = y_form_coeffs(1, tau0, -2, 6, 600, 1e-9, 2);
    cplx lhs = evaluate_expansion(fe, z);
    cplx rhs = oracle(1, tau0, 1, z, 500, 0.05);
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-2);
  }
  SUBCASE("order two fixed point") {
    cplx tau0(0.0, 1.0), z(0.3, 3.05);
    FourierExpansion fe = y_form_coeffs(1, tau0, -2, 6, 600, 1e-9, 2);
    cplx lhs = evaluate_expansion(fe, z);
    cplx rhs = oracle(1, tau0, 2, z, 800, 0.05);
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-2);
  }
}

TEST_CASE("congruence filter rejects incompatible pole orders") {
  cplx rho(-0.5, std::sqrt(3.0) / 2.0);
  CHECK_THROWS_AS(y_form_coeffs(1, cplx(0.0, 1.0), -1, 4, 200), invalid_input);
  CHECK_THROWS_AS(y_form_coeffs(1, rho, -1, 4, 200), invalid_input);
  CHECK_THROWS_AS(y_form_coeffs(1, rho, -2, 4, 200), invalid_input);
  FourierExpansion fe = y_form_coeffs(1, rho, -3, 2, 200);
  CHECK(std::isfinite(fe.hol.at(0).real()));
  CHECK(std::isfinite(fe.antihol.at(-1).imag()));
}

TEST_CASE("assembly is linear and validates its spec") {
  GroupData gd = group_data(1);
  PrincipalPartSpec empty;
  FourierExpansion zero = assemble(empty, 4, 100);
  CHECK(zero.hol.empty());
  CHECK(zero.antihol.empty());

  PrincipalPartSpec one;
  one.cusp_parts.push_back({gd.cusp_infinity(), {{-1, cplx(1.0)}}});
  FourierExpansion a = assemble(one, 2, 500);
  FourierExpansion direct =
      maass_poincare_coeffs(1, gd.cusp_infinity(), -1, 0, 2, 500);
  for (const auto& [n, c] : direct.hol) CHECK(a.hol.at(n) == c);

  PrincipalPartSpec both;
  both.cusp_parts.push_back(
      {gd.cusp_infinity(), {{-2, cplx(2.0)}, {-1, cplx(1.0)}}});
  FourierExpansion sum = assemble(both, 2, 500);
  FourierExpansion manual =
      maass_poincare_coeffs(1, gd.cusp_infinity(), -2, 0, 2, 500);
  for (auto& [n, c] : manual.hol) c *= 2.0;
  add_scaled(manual, direct, 1.0);
  for (const auto& [n, c] : manual.hol) CHECK(sum.hol.at(n) == c);

  PrincipalPartSpec bad_weight;
  bad_weight.weight = -2;
  bad_weight.elliptic_parts.push_back({cplx(0.2, 1.1), 0, {{-1, cplx(1.0)}}});
  CHECK_THROWS_AS(assemble(bad_weight, 2, 100), invalid_input);

  PrincipalPartSpec dup;
  dup.elliptic_parts.push_back({cplx(0.2, 1.1), 0, {{-1, cplx(1.0)}}});
  dup.elliptic_parts.push_back({cplx(1.2, 1.1), 0, {{-1, cplx(1.0)}}});
  CHECK_THROWS_AS(assemble(dup, 2, 100), invalid_input);

  PrincipalPartSpec wrong_omega;
  wrong_omega.elliptic_parts.push_back({cplx(0.2, 1.1), 2, {{-1, cplx(1.0)}}});
  CHECK_THROWS_AS(assemble(wrong_omega, 2, 100), invalid_input);
}

TEST_CASE("resummation flags the validity region") {
  cplx tau0(0.21, 1.2);
  FourierExpansion fe = y_form_coeffs(1, tau0, -1, 4, 300);
  CHECK(fe.valid_y == doctest::Approx(tau0.imag() + 2.0 / tau0.imag()));
  bool in = true;
  evaluate_expansion(fe, cplx(0.3, 1.0), &in);
  CHECK(!in);
  evaluate_expansion(fe, cplx(0.3, 3.2), &in);
  CHECK(in);
}
