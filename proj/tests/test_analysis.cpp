#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "pmaass/analysis.hpp"
#include "pmaass/arith.hpp"
#include "pmaass/basis.hpp"
#include "pmaass/errors.hpp"
#include "pmaass/numeric.hpp"
#include "pmaass/poincare_series.hpp"
#include "pmaass/special_functions.hpp"

using namespace pmaass;

namespace {

cplx ipow_t(cplx b, long e) {
  if (e < 0) return 1.0 / ipow_t(b, -e);
  cplx r(1.0);
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

// Incomplete beta by composite Simpson; the integrands here are polynomials,
// so a modest grid is exact to roundoff.  Independent of the library path.
double beta_simpson(double y, long a, long b) {
  const int n = 512;
  double h = y / n;
  auto f = [&](double t) {
    return std::pow(t, static_cast<double>(a - 1)) *
           std::pow(1.0 - t, static_cast<double>(b - 1));
  };
  double s = f(0.0) + f(y);
  for (int i = 1; i < n; ++i) s += (2.0 + 2.0 * (i & 1)) * f(i * h);
  return s * h / 3.0;
}

// q-coefficients of prod_{n>=1} (1-q^n)^e1 (1-q^{11n})^e11, shifted by one
// power of q, i.e. of q prod(...): slot m holds the coefficient of q^m.
std::vector<double> eta_product(int e1, int e11, long len) {
  std::vector<double> f(len, 0.0);
  f[0] = 1.0;
  for (long n = 1; n < len; ++n) {
    for (int rep = 0; rep < e1; ++rep)
      for (long i = len - 1; i >= n; --i) f[i] -= f[i - n];
    if (e11 > 0 && 11 * n < len)
      for (int rep = 0; rep < e11; ++rep)
        for (long i = len - 1; i >= 11 * n; --i) f[i] -= f[i - 11 * n];
  }
  std::vector<double> shifted(len, 0.0);
  for (long i = 0; i + 1 < len; ++i) shifted[i + 1] = f[i];
  return shifted;
}

cplx qseries_eval(const std::vector<double>& a, cplx z) {
  ComplexSum s;
  for (long m = 1; m < static_cast<long>(a.size()); ++m)
    if (a[m] != 0.0)
      s.add(a[m] * std::exp(cplx(0.0, TWO_PI * m) * z));
  return s.value();
}

}  // namespace

TEST_CASE("moebius coordinate maps the half-plane to the disk") {
  cplx i(0.0, 1.0);
  CHECK(std::abs(xmap(cplx(0.3, 1.7), cplx(0.3, 1.7))) < 1e-15);
  CHECK(std::abs(xmap(i, 2.0 * i) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(xmap(i, cplx(0.4, 2.3))) < 1.0);
  CHECK(std::abs(xmap(i, cplx(0.4, -2.3))) > 1.0);

  // The order-2 stabilizer of i rotates X by e^{2 pi i / 2} = -1.
  cplx z(0.37, 1.21);
  CHECK(std::abs(xmap(i, -1.0 / z) + xmap(i, z)) < 1e-14);

  CHECK_THROWS_AS(xmap(i, -i), invalid_input);
}

TEST_CASE("elliptic extraction round-trips synthetic expansions") {
  cplx zh(0.4, 1.3);

  SUBCASE("constant input") {
    EllipticExpansion e = elliptic_coeffs([](cplx) { return cplx(1.0); }, zh,
                                          1, -3, 3, 0.4, 128);
    CHECK(std::abs(e.a.at(0) - 1.0) < 1e-10);
    for (long n = -3; n <= 3; ++n) {
      if (n != 0) CHECK(std::abs(e.a.at(n)) < 1e-10);
      if (n <= -1) CHECK(std::abs(e.b.at(n)) < 1e-8);
    }
  }

  SUBCASE("random data across weights and stabilizer orders") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (long k : {1L, 2L}) {
      for (long omega : {1L, 2L, 3L}) {
        CAPTURE(k);
        CAPTURE(omega);
        std::map<long, cplx> a_in, b_in;
        for (long n = -4; n <= 4; ++n) {
          if ((((n - (k - 1)) % omega) + omega) % omega != 0) continue;
          a_in[n] = cplx(U(rng), U(rng));
          if (n <= -1) b_in[n] = cplx(U(rng), U(rng));
        }
        auto F = [&](cplx z) {
          cplx X = xmap(zh, z);
          double r2 = std::norm(X);
          cplx s(0.0);
          for (const auto& [n, an] : a_in) s += an * ipow_t(X, n);
          for (const auto& [n, bn] : b_in)
            s += bn * beta_simpson(r2, -n, 2 * k - 1) * ipow_t(X, n);
          return s * ipow_t(z - std::conj(zh), 2 * k - 2);
        };
        EllipticExpansion e = elliptic_coeffs(F, zh, k, -4, 4, 0.4, 128);
        for (long n = -4; n <= 4; ++n) {
          cplx a_ref = a_in.count(n) ? a_in.at(n) : cplx(0.0);
          CHECK(std::abs(e.a.at(n) - a_ref) < 1e-8);
          if (n <= -1) {
            cplx b_ref = b_in.count(n) ? b_in.at(n) : cplx(0.0);
            CHECK(std::abs(e.b.at(n) - b_ref) < 1e-8);
          }
        }
      }
    }
  }
}

TEST_CASE("extraction guards flag bad separations") {
  cplx zh(0.4, 1.3);
  // log|X| carries the radial factor that only the third (absent-subspace)
  // branch produces, so the two circles disagree at n = 0.
  auto Flog = [&](cplx z) { return cplx(-std::log(std::norm(xmap(zh, z)))); };
  CHECK_THROWS_AS(elliptic_coeffs(Flog, zh, 1, 0, 1, 0.4, 64), numeric_guard);

  // At a tiny radius the two beta factors for a deep pole order are both
  // numerically zero and cannot be separated.
  auto Fone = [](cplx) { return cplx(1.0); };
  CHECK_THROWS_AS(elliptic_coeffs(Fone, zh, 1, -8, -8, 0.05, 64),
                  numeric_guard);

  CHECK_THROWS_AS(elliptic_coeffs(Fone, zh, 1, 0, 1, 1.2, 64), invalid_input);
  CHECK_THROWS_AS(elliptic_coeffs(Fone, cplx(0.0, -1.0), 1, 0, 1, 0.4, 64),
                  invalid_input);
  CHECK_THROWS_AS(elliptic_coeffs(Fone, zh, 0, -1, 1, 0.4, 64), invalid_input);
}

TEST_CASE("kernel principal part survives contour extraction") {
  // 2 v0 y Psi_2(tau0, .) has principal part X^{-1} at tau0, and at level 1
  // it is meromorphic, so its beta coefficients vanish as well.
  cplx tau0(0.21, 1.2);
  PsiEvalParams p;
  p.c_max = 100;
  auto F = [&](cplx z) {
    return 2.0 * tau0.imag() * y_psi2(1, {tau0, z}, p);
  };
  EllipticExpansion e = elliptic_coeffs(F, tau0, 1, -2, 0, 0.2, 64, 1, 1e-3);
  CHECK(std::abs(e.a.at(-1) - 1.0) < 1e-4);
  CHECK(std::abs(e.a.at(-2)) < 1e-4);
  CHECK(std::abs(e.b.at(-1)) < 1e-3);
}

TEST_CASE("holomorphic coefficients agree between extraction methods") {
  SUBCASE("discriminant fixture at the order-two point") {
    std::vector<double> tau = eta_product(24, 0, 36);
    CHECK(tau[1] == 1.0);
    CHECK(tau[2] == -24.0);
    CHECK(tau[3] == 252.0);
    cplx i(0.0, 1.0);
    std::vector<cplx> a = cusp_form_elliptic_coeffs(tau, i, 6, 5);
    cplx direct = ipow_t(2.0 * i, 12) * qseries_eval(tau, i);
    CHECK(std::abs(a[0] - direct) < 1e-10 * std::abs(direct));
    // Stabilizer order 2 at i forces n == -k == 0 (mod 2) in the
    // holomorphic normalization: odd slots vanish.
    CHECK(std::abs(a[1]) < 1e-8 * std::abs(a[0]));
    CHECK(std::abs(a[3]) < 1e-8 * std::abs(a[0]));
    CHECK(std::abs(a[5]) < 1e-8 * std::abs(a[0]));
  }

  SUBCASE("discriminant fixture at the order-three point") {
    std::vector<double> tau = eta_product(24, 0, 36);
    cplx rho(-0.5, std::sqrt(3.0) / 2.0);
    std::vector<cplx> a = cusp_form_elliptic_coeffs(tau, rho, 6, 4);
    // n == -6 == 0 (mod 3): slots 1, 2, 4 vanish, slots 0 and 3 survive.
    CHECK(std::abs(a[1]) < 1e-8 * std::abs(a[0]));
    CHECK(std::abs(a[2]) < 1e-8 * std::abs(a[0]));
    CHECK(std::abs(a[4]) < 1e-8 * std::abs(a[0]));
    CHECK(std::abs(a[3]) > 1e-6 * std::abs(a[0]));
  }

  SUBCASE("level 11 form against contour extraction") {
    std::vector<double> g = eta_product(2, 2, 45);
    CHECK(g[1] == 1.0);
    CHECK(g[2] == -2.0);
    CHECK(g[3] == -1.0);
    CHECK(g[4] == 2.0);
    CHECK(g[5] == 1.0);
    CHECK(g[6] == 2.0);
    CHECK(g[7] == -2.0);
    cplx zh(0.5, 1.5);
    std::vector<cplx> a = cusp_form_elliptic_coeffs(g, zh, 1, 4);
    CHECK(std::abs(a[0] - ipow_t(2.0 * cplx(0, zh.imag()), 2) *
                              qseries_eval(g, zh)) < 1e-12);
    auto Fg = [&](cplx z) { return qseries_eval(g, z); };
    EllipticExpansion e = elliptic_coeffs(Fg, zh, 0, 0, 4, 0.3, 128);
    for (long n = 0; n <= 4; ++n) {
      CAPTURE(n);
      CHECK(std::abs(e.a.at(n) - a[n]) < 1e-7);
    }
  }
}

TEST_CASE("xi kills holomorphic input and conjugates antiholomorphic input") {
  cplx z(0.3, 1.1);

  auto hol = [](cplx w) { return std::exp(cplx(0.0, TWO_PI) * w); };
  CHECK(std::abs(xi_numeric(hol, 0.0, z)) < 1e-9);

  // xi_0 e^{-2 pi i conj(z)} = -4 pi e^{2 pi i z}.
  auto anti = [](cplx w) {
    return std::exp(cplx(0.0, -TWO_PI) * std::conj(w));
  };
  cplx target = -2.0 * TWO_PI * std::exp(cplx(0.0, TWO_PI) * z);
  CHECK(std::abs(xi_numeric(anti, 0.0, z) - target) < 1e-8);

  // xi_kappa y^s = s y^{kappa + s - 1}: at s = 1 - kappa the image is the
  // constant 1 - kappa.
  for (double kappa : {0.0, 2.0, -2.0}) {
    CAPTURE(kappa);
    auto pow_y = [&](cplx w) {
      return cplx(std::pow(w.imag(), 1.0 - kappa));
    };
    CHECK(std::abs(xi_numeric(pow_y, kappa, z) - (1.0 - kappa)) < 1e-7);
  }

  auto rough = [](cplx w) { return cplx(std::cos(5000.0 * w.real())); };
  CHECK_THROWS_AS(xi_numeric(rough, 0.0, cplx(0.3, 2.0)), numeric_guard);
}

TEST_CASE("laplacian matches closed forms and factors through xi") {
  cplx z(0.4, 1.3);

  auto fy = [](cplx w) { return cplx(w.imag()); };
  CHECK(std::abs(laplacian_numeric(fy, 0.0, z)) < 1e-9);

  auto flog = [](cplx w) { return cplx(std::log(w.imag())); };
  CHECK(std::abs(laplacian_numeric(flog, 0.0, z) - 1.0) < 1e-8);

  auto hol = [](cplx w) { return std::exp(cplx(0.0, TWO_PI) * w); };
  CHECK(std::abs(laplacian_numeric(hol, 0.0, z)) < 1e-6);

  // Delta_kappa = -xi_{2-kappa} . xi_kappa on a generic smooth function.
  auto smooth = [](cplx w) {
    double x = w.real(), y = w.imag();
    return cplx(y * y * y * std::cos(TWO_PI * x), y * std::sin(x + y));
  };
  for (double kappa : {0.0, 2.0}) {
    CAPTURE(kappa);
    auto inner = [&](cplx w) { return xi_numeric(smooth, kappa, w, 2e-3); };
    cplx via_xi = -xi_numeric(inner, 2.0 - kappa, z, 2e-3);
    cplx via_stencil = laplacian_numeric(smooth, kappa, z);
    CHECK(std::abs(via_xi - via_stencil) < 1e-3);
  }
}

TEST_CASE("kernel is annihilated by the weight zero laplacian") {
  // The stencil error near a pole of the kernel at distance d scales like
  // h^6 / d^9, so the evaluation point is kept >= 0.49 away from every
  // translate of the pole; the cutoffs are pinned because adaptive ones can
  // jump between stencil points and break the Richardson cancellation.
  PsiEvalParams p;
  p.c_max = 120;
  p.tol = 1e-11;
  p.n_max = 24;
  p.m_max = 24;
  cplx zf(-0.15, 0.8);
  auto F = [&](cplx z) { return y_psi2(1, {zf, z}, p); };
  cplx resid = laplacian_numeric(F, 0.0, cplx(-0.35, 1.45), 0.01);
  CHECK(std::abs(resid) < 1e-6);
}

TEST_CASE("xi image of the kernel transforms with weight two") {
  cplx zf(-0.15, 0.8), z(0.3, 1.1);

  // At level 1 the xi image is the weight 2 level 1 cusp form kernel, which
  // vanishes identically; what remains is finite difference noise.
  {
    PsiEvalParams p;
    p.c_max = 100;
    p.n_max = 24;
    p.m_max = 24;
    auto F = [&](cplx w) { return y_psi2(1, {zf, w}, p); };
    CHECK(std::abs(xi_numeric(F, 0.0, z)) < 1e-4);
  }

  // At level 11 the image is a genuine cusp form: nonzero, and periodic in z.
  {
    PsiEvalParams p;
    p.c_max = 330;
    p.n_max = 24;
    p.m_max = 24;
    auto F = [&](cplx w) { return y_psi2(11, {zf, w}, p); };
    cplx phi = xi_numeric(F, 0.0, z);
    CHECK(std::abs(phi) > 1e-4);
    cplx phi_t = xi_numeric(F, 0.0, z + 1.0);
    CHECK(std::abs(phi_t - phi) < 1e-6 * std::abs(phi));
  }
}

TEST_CASE("contour residue classifies pole kinds") {
  cplx z0(0.25, 1.05);

  auto simple = [&](cplx w) { return 1.0 / (w - z0); };
  CHECK(std::abs(residue_in_zhbar(simple, z0, 0.3) - 1.0) < 1e-10);

  auto dbl = [&](cplx w) { return 1.0 / ((w - z0) * (w - z0)); };
  CHECK(std::abs(residue_in_zhbar(dbl, z0, 0.3)) < 1e-10);

  auto weighted = [&](cplx w) { return std::exp(w) / (w - z0); };
  CHECK(std::abs(residue_in_zhbar(weighted, z0, 0.3) - std::exp(z0)) <
        1e-8 * std::abs(std::exp(z0)));

  // A pole sitting exactly on the first sample angle produces a non-finite
  // sample; one just off the circle stalls the doubling.
  auto on_contour = [&](cplx w) { return 1.0 / (w - (z0 + 0.3)); };
  CHECK_THROWS_AS(residue_in_zhbar(on_contour, z0, 0.3), numeric_guard);
  auto near_contour = [&](cplx w) {
    return 1.0 / (w - (z0 + cplx(0.3000004, 0.0000003)));
  };
  CHECK_THROWS_AS(residue_in_zhbar(near_contour, z0, 0.3), numeric_guard);

  CHECK_THROWS_AS(residue_in_zhbar(simple, z0, -0.1), invalid_input);
}

TEST_CASE("kernel residue identifies a differential of the third kind") {
  cplx z0(0.25, 1.05);
  double cN = group_data(1).c_constant.value();
  PsiEvalParams p;
  p.c_max = 30;
  auto F = [&](cplx zf) { return y_psi2(1, {zf, z0}, p) - cN / zf.imag(); };
  cplx res = residue_in_zhbar(F, z0, 0.2);
  CHECK(std::abs(res - cplx(0.0, -1.0)) < 1e-6);
}
