#include "pmaass/special_functions.hpp"

#include <cmath>

#include "pmaass/arith.hpp"
#include "pmaass/errors.hpp"

namespace pmaass {

double bessel_i(int nu, double x) {
  if (nu < 0) throw invalid_input("DomainError", "bessel_i needs nu >= 0");
  if (x < 0) throw invalid_input("DomainError", "bessel_i needs x >= 0");
  if (x > 690)
    throw numeric_guard("IllConditioned", "bessel_i overflow range");
  double h = 0.5 * x;
  // term_0 = (x/2)^nu / nu!
  double term = 1.0;
  for (int k = 1; k <= nu; ++k) term *= h / k;
  double sum = term;
  double h2 = h * h;
  for (int k = 1; k < 400; ++k) {
    term *= h2 / (static_cast<double>(k) * (nu + k));
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

namespace {

double j1_series(double x) {
  // sum_k (-1)^k (x/2)^{2k+1} / (k! (k+1)!)
  double h = 0.5 * x, h2 = h * h;
  double term = h, sum = h;
  for (int k = 1; k < 80; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-18 + 1e-300) break;
  }
  return sum;
}

double j1_miller(double x) {
  // Backward recurrence j_{k-1} = (2k/x) j_k - j_{k+1}, normalized by
  // J_0 + 2 J_2 + 2 J_4 + ... = 1.
  int start = static_cast<int>(x + 40.0 + 14.0 * std::cbrt(x));
  start += start & 1;  // even start index
  double jp = 0.0;     // j_{k+1}
  double jc = 1e-30;   // j_k, seeded arbitrarily small
  double norm = 0.0, j1 = 0.0;
  for (int k = start; k >= 1; --k) {
    double jm = (2.0 * k / x) * jc - jp;
    jp = jc;
    jc = jm;
    int idx = k - 1;  // jc now approximates J_idx
    if (idx == 1) j1 = jc;
    if (idx >= 2 && idx % 2 == 0) norm += 2.0 * jc;
    if (std::abs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      norm *= 1e-250;
      j1 *= 1e-250;
    }
  }
  norm += jc;  // + J_0
  return j1 / norm;
}

}  // namespace

double bessel_j1(double x) {
  if (x < 0) return -bessel_j1(-x);
  if (x <= 12.0) return j1_series(x);
  return j1_miller(x);
}

double incomplete_gamma_int(int s, double y) {
  if (s < 1) throw invalid_input("DomainError", "needs integer s >= 1");
  if (y < 0) throw invalid_input("DomainError", "needs y >= 0");
  double fact = 1.0;
  for (int k = 2; k < s; ++k) fact *= k;  // (s-1)!
  double inner = 1.0, term = 1.0;
  for (int j = 1; j < s; ++j) {
    term *= y / j;
    inner += term;
  }
  return fact * std::exp(-y) * inner;
}

double incomplete_beta(double y, double a, double b) {
  if (a <= 0) throw invalid_input("DomainError", "incomplete_beta needs a > 0");
  if (y < 0 || y > 1)
    throw invalid_input("DomainError", "incomplete_beta needs 0 <= y <= 1");
  if (y == 0) return 0.0;
  if (y == 1 && b <= 0)
    throw invalid_input("DomainError", "divergent endpoint: y = 1 with b <= 0");
  // tanh-sinh on t = y * u, u in (0, 1): handles the endpoint power laws at
  // u -> 0 (a < 1) and, when y = 1, at u -> 1 (b < 1).  The substitution is
  // u = (1 + tanh((pi/2) sinh v)) / 2 over v in (-V, V), but u and 1 - u are
  // produced in sigmoid form so neither rounds to an exact endpoint while its
  // neighborhood still contributes above the working precision.
  auto f = [&](double u, double um1) {
    double t = y * u;
    double one_m = (1.0 - y) + y * um1;
    return std::pow(t, a - 1.0) * std::pow(one_m, b - 1.0);
  };
  const double V = 3.8;
  double prev = 0.0, result = 0.0;
  for (int level = 2; level <= 11; ++level) {
    long n = 1L << level;
    double h = 2.0 * V / n;
    RealSum acc;
    for (long i = 0; i <= n; ++i) {
      double v = -V + i * h;
      double sh = std::sinh(v);
      double q = std::exp(-PI * std::abs(sh));
      double lo = q / (1.0 + q);
      if (lo == 0.0) continue;
      double hi = 1.0 / (1.0 + q);
      // sech^2 in overflow-free form: 4 q / (1 + q)^2.
      double w = 0.5 * PI * std::cosh(v) * 4.0 * q / ((1.0 + q) * (1.0 + q));
      double u = (sh >= 0.0) ? hi : lo;
      double um1 = (sh >= 0.0) ? lo : hi;
      acc.add(w * f(u, um1));
    }
    result = acc.value() * 0.5 * h * y;
    if (level > 4 && std::abs(result - prev) <
                         1e-14 * std::max(1.0, std::abs(result)))
      break;
    prev = result;
  }
  return result;
}

cplx eta(cplx tau) {
  double v = tau.imag();
  if (v <= 0)
    throw invalid_input("DomainError", "eta needs Im(tau) > 0");
  cplx q = std::exp(cplx(0, TWO_PI) * tau);
  long n_max = std::max<long>(5, static_cast<long>(46.0 / (TWO_PI * v)) + 2);
  cplx prod = 1.0;
  cplx qn = 1.0;
  for (long n = 1; n <= n_max; ++n) {
    qn *= q;
    prod *= 1.0 - qn;
    if (std::abs(qn) < 1e-19) break;
  }
  return std::exp(cplx(0, PI) * tau / 12.0) * prod;
}

cplx eisenstein_e2(cplx tau) {
  double v = tau.imag();
  if (v <= 0)
    throw invalid_input("DomainError", "E2 needs Im(tau) > 0");
  cplx q = std::exp(cplx(0, TWO_PI) * tau);
  long m_max = std::max<long>(5, static_cast<long>(50.0 / (TWO_PI * v)) + 4);
  ComplexSum acc;
  cplx qm = 1.0;
  for (long m = 1; m <= m_max; ++m) {
    qm *= q;
    acc.add(static_cast<double>(sigma1(m)) * qm);
  }
  return 1.0 - 24.0 * acc.value();
}

cplx e2_hat(cplx tau) {
  return eisenstein_e2(tau) - 3.0 / (PI * tau.imag());
}

cplx log_gamma(cplx z) {
  static const double g[] = {0.99999999999980993,  676.5203681218851,
                             -1259.1392167224028,  771.32342877765313,
                             -176.61502916214059,  12.507343278686905,
                             -0.13857109526572012, 9.9843695780195716e-6,
                             1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // Reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z).
    return std::log(PI / std::sin(PI * z)) - log_gamma(1.0 - z);
  }
  cplx x = g[0];
  cplx zm = z - 1.0;
  for (int i = 1; i < 9; ++i) x += g[i] / (zm + static_cast<double>(i));
  cplx t = zm + 7.5;
  return 0.5 * std::log(TWO_PI) + (zm + 0.5) * std::log(t) - t + std::log(x);
}

cplx gamma_ratio_half(cplx s) {
  return std::exp(log_gamma(0.5 + s) - log_gamma(1.0 + s));
}

}  // namespace pmaass
