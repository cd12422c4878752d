#include "pmaass/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pmaass/errors.hpp"

namespace pmaass {

Factorization factorize(long n) {
  if (n < 1) throw invalid_input("DomainError", "factorize needs n >= 1");
  Factorization f;
  for (long p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.primes.emplace_back(p, e);
  }
  if (n > 1) f.primes.emplace_back(n, 1);
  return f;
}

long totient(long n) {
  long r = n;
  for (auto [p, e] : factorize(n).primes) r -= r / p;
  return r;
}

int moebius(long n) {
  int sign = 1;
  for (auto [p, e] : factorize(n).primes) {
    if (e > 1) return 0;
    sign = -sign;
  }
  return sign;
}

long sigma1(long n) {
  long r = 1;
  for (auto [p, e] : factorize(n).primes) {
    long pk = 1, s = 1;
    for (int i = 0; i < e; ++i) {
      pk *= p;
      s += pk;
    }
    r *= s;
  }
  return r;
}

std::vector<long> divisors(long n) {
  std::vector<long> d{1};
  for (auto [p, e] : factorize(n).primes) {
    size_t base = d.size();
    long pk = 1;
    for (int i = 0; i < e; ++i) {
      pk *= p;
      for (size_t j = 0; j < base; ++j) d.push_back(d[j] * pk);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

namespace {

// Extended Euclid: returns g = gcd(a,b) and x,y with a x + b y = g.
long ext_gcd(long a, long b, long& x, long& y) {
  if (b == 0) {
    x = (a >= 0) ? 1 : -1;
    y = 0;
    return a >= 0 ? a : -a;
  }
  long x1, y1;
  long g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

}  // namespace

long mod_inverse(long a, long m) {
  if (m < 1) throw invalid_input("DomainError", "modulus must be positive");
  if (m == 1) return 0;
  long x, y;
  long g = ext_gcd(((a % m) + m) % m, m, x, y);
  if (g != 1)
    throw invalid_input("NotInvertible", std::to_string(a) + " mod " +
                                             std::to_string(m));
  long r = x % m;
  return r < 0 ? r + m : r;
}

std::string Cusp::label() const {
  if (at_infinity) return "inf";
  return std::to_string(alpha) + "/" + std::to_string(gamma);
}

const Cusp* GroupData::find_cusp(const std::string& lab) const {
  for (const Cusp& c : cusps)
    if (c.label() == lab) return &c;
  // Accept "0" and "oo"/"infinity" spellings.
  if (lab == "0") return find_cusp("0/1");
  if (lab == "oo" || lab == "infinity") return find_cusp("inf");
  return nullptr;
}

bool cusp_equivalent(long N, long a1, long c1, long a2, long c2) {
  if (N < 1) throw invalid_input("InvalidLevel", "level must be positive");
  // Normalize each fraction: reduced, denominator >= 0 (c = 0 is infinity).
  auto normalize = [](long& a, long& c) {
    if (a == 0 && c == 0)
      throw invalid_input("DomainError", "0/0 is not a cusp");
    long g = std::gcd(std::abs(a), std::abs(c));
    a /= g;
    c /= g;
    if (c < 0 || (c == 0 && a < 0)) {
      a = -a;
      c = -c;
    }
  };
  normalize(a1, c1);
  normalize(a2, c2);
  // Complete a/c to [[a, b], [c, d]] in SL2(Z); the classes match exactly
  // when c2*d1 - c1*d2 is divisible by gcd(c1*c2, N).
  auto completion_d = [](long a, long c) {
    long x, y;
    ext_gcd(a, c, x, y);  // a x + c y = 1; take d = x (b = -y)
    return x;
  };
  long d1 = completion_d(a1, c1);
  long d2 = completion_d(a2, c2);
  long mod = std::gcd(c1 * c2, N);
  if (mod == 0) mod = N;  // both cusps at infinity
  long lhs = (c2 * d1 - c1 * d2) % mod;
  return lhs == 0;
}

bool point_equivalent(long N, cplx z1, cplx z2) {
  if (N < 1) throw invalid_input("InvalidLevel", "level must be positive");
  double y1 = z1.imag(), y2 = z2.imag();
  if (y1 <= 0 || y2 <= 0)
    throw invalid_input("DomainError", "points must lie in the upper half plane");
  const double tol = 1e-7;
  auto verify = [&](long a, long b, long c, long d) {
    if (a * d - b * c != 1) return false;
    cplx num = static_cast<double>(a) * z1 + static_cast<double>(b);
    cplx den = static_cast<double>(c) * z1 + static_cast<double>(d);
    return std::abs(num / den - z2) < 1e-6;
  };
  // c = 0: translations only.
  double shift = (z2 - z1).real();
  if (std::abs((z2 - z1).imag()) < tol &&
      std::abs(shift - std::round(shift)) < tol) {
    long b = std::lround(shift);
    if (verify(1, b, 0, 1)) return true;
  }
  // c > 0 multiples of N; |c z1 + d|^2 = y1/y2 pins d to at most two integers.
  long cmax = static_cast<long>(std::floor(1.0 / std::sqrt(y1 * y2))) + 1;
  for (long c = N; c <= cmax; c += N) {
    double disc = y1 / y2 - static_cast<double>(c) * c * y1 * y1;
    if (disc < -tol) break;  // larger c only shrinks it
    double root = std::sqrt(std::max(disc, 0.0));
    for (int sgn : {-1, 1}) {
      double dreal = -c * z1.real() + sgn * root;
      for (long d = std::lround(dreal) - 1; d <= std::lround(dreal) + 1; ++d) {
        cplx w = z2 * (static_cast<double>(c) * z1 + static_cast<double>(d));
        double af = w.imag() / y1;
        long a = std::lround(af);
        if (std::abs(af - a) > 1e-4) continue;
        double bf = w.real() - af * z1.real();
        long b = std::lround(bf);
        if (std::abs(bf - b) > 1e-4) continue;
        if (verify(a, b, c, d)) return true;
      }
      if (root < tol) break;  // the two sign branches coincide
    }
  }
  return false;
}

int elliptic_order(long N, cplx tau) {
  if (N < 1) throw invalid_input("InvalidLevel", "level must be positive");
  double y = tau.imag();
  if (y <= 0)
    throw invalid_input("DomainError", "point must lie in the upper half plane");
  // Count non-identity stabilizing matrices; the stabilizer mod {±I} is
  // cyclic of order 1, 2, or 3, so the count is order - 1.
  int found = 0;
  long cmax = static_cast<long>(std::floor(1.0 / y)) + 1;
  for (long c = N; c <= cmax; c += N) {
    // |c tau + d|^2 = 1 for a stabilizing matrix.
    double disc = 1.0 - static_cast<double>(c) * c * y * y;
    if (disc < -1e-9) break;
    double root = std::sqrt(std::max(disc, 0.0));
    for (int sgn : {-1, 1}) {
      double dreal = -c * tau.real() + sgn * root;
      for (long d = std::lround(dreal) - 1; d <= std::lround(dreal) + 1; ++d) {
        cplx w = tau * (static_cast<double>(c) * tau + static_cast<double>(d));
        double af = w.imag() / y;
        long a = std::lround(af);
        if (std::abs(af - a) > 1e-5) continue;
        double bf = w.real() - af * tau.real();
        long b = std::lround(bf);
        if (std::abs(bf - b) > 1e-5) continue;
        if (a * d - b * c != 1) continue;
        cplx num = static_cast<double>(a) * tau + static_cast<double>(b);
        cplx den = static_cast<double>(c) * tau + static_cast<double>(d);
        if (std::abs(num / den - tau) < 1e-7) ++found;
      }
      if (root < 1e-9) break;
    }
  }
  if (found > 2) found = 2;  // guard against double-counted borderline hits
  return found + 1;
}

namespace {

long prime_part(long n, long support) {
  // Largest divisor of n supported on the primes dividing `support`.
  long r = 1;
  for (auto [p, e] : factorize(n).primes) {
    if (support % p) continue;
    for (int i = 0; i < e; ++i) r *= p;
  }
  return r;
}

std::vector<EllipticPoint> elliptic_points(long N, long index) {
  long nu2_expect = 1, nu3_expect = 1;
  {
    Factorization f = factorize(N);
    for (auto [p, e] : f.primes) {
      if (p == 2)
        nu2_expect *= (e == 1) ? 1 : 0;
      else
        nu2_expect *= 1 + ((p % 4 == 1) ? 1 : -1);
      if (p == 3)
        nu3_expect *= (e == 1) ? 1 : 0;
      else
        nu3_expect *= 1 + ((p % 3 == 1) ? 1 : -1);
    }
  }
  (void)index;
  auto search = [&](long cbound) {
    std::vector<EllipticPoint> reps;
    for (long c = N; c <= cbound; c += N) {
      for (int t = -1; t <= 1; ++t) {
        for (long a = -5 * c; a <= 5 * c; ++a) {
          long d = t - a;
          long ad1 = a * d - 1;
          if (ad1 % c) continue;
          // Fixed point of [[a, b], [c, d]] with trace t, |t| < 2.
          double x = static_cast<double>(a - d) / (2.0 * c);
          double y = std::sqrt(4.0 - t * t) / (2.0 * c);
          // Reduce x into [-1/2, 1/2) with the translation T.
          x -= std::floor(x + 0.5);
          cplx z(x, y);
          int order = (t == 0) ? 2 : 3;
          bool fresh = true;
          for (const EllipticPoint& r : reps) {
            if (r.order != order) continue;
            if (std::abs(r.tau - z) < 1e-9 || point_equivalent(N, r.tau, z)) {
              fresh = false;
              break;
            }
          }
          if (fresh) reps.push_back({z, order});
        }
      }
    }
    return reps;
  };
  std::vector<EllipticPoint> reps = search(10 * N);
  auto count = [&](int ord) {
    return std::count_if(reps.begin(), reps.end(),
                         [&](const EllipticPoint& r) { return r.order == ord; });
  };
  if (count(2) != nu2_expect || count(3) != nu3_expect) {
    reps = search(30 * N);
    if (count(2) != nu2_expect || count(3) != nu3_expect)
      throw numeric_guard("IllConditioned",
                          "elliptic point search did not close");
  }
  std::stable_sort(reps.begin(), reps.end(),
                   [](const EllipticPoint& u, const EllipticPoint& v) {
                     if (u.order != v.order) return u.order < v.order;
                     return u.tau.real() < v.tau.real();
                   });
  return reps;
}

}  // namespace

long cusp_width(long N, long gamma) {
  if (gamma < 1 || N % gamma)
    throw invalid_input("InvalidCuspData", "gamma must divide N");
  long m = N / gamma;
  return m / std::gcd(m, gamma);
}

EllSplit ell_splits(long ell, long gamma, long N) {
  if (gamma < 1 || N < 1 || N % gamma)
    throw invalid_input("InvalidCuspData", "gamma must divide N");
  if (ell < 1) throw invalid_input("InvalidCuspData", "width must be positive");
  EllSplit s;
  s.ell = ell;
  s.ell1 = prime_part(ell, gamma);
  s.ell2 = ell / s.ell1;
  if ((N / gamma) % s.ell2)
    throw invalid_input("InvalidCuspData",
                        "ell is not a width for this gamma and N");
  s.n1 = (N / gamma) / s.ell2;
  if (s.n1 == 1) {
    s.a1 = 1;
    s.a2 = s.ell1 * gamma;
  } else {
    s.a1 = prime_part(s.ell1 * gamma, s.n1);
    s.a2 = s.ell1 * gamma / s.a1;
  }
  return s;
}

GroupData group_data(long N) {
  if (N < 1) throw invalid_input("InvalidLevel", "level must be positive");
  if (N > 10000)
    throw invalid_input("LevelTooLarge", "levels above 10000 are unsupported");
  GroupData G;
  G.level = N;
  G.index = N;
  for (auto [p, e] : factorize(N).primes) G.index += G.index / p;
  {
    long g = std::gcd(6L, G.index);
    G.c_constant = {-6 / g, G.index / g};
  }

  // Cusp representatives: for each c | N the classes are a mod gcd(c, N/c).
  for (long c : divisors(N)) {
    long g = std::gcd(c, N / c);
    for (long a0 = 0; a0 < std::max(g, 1L); ++a0) {
      if (std::gcd(a0, g) != 1 && g > 1) continue;
      if (g == 1 && a0 != 0) continue;
      Cusp cusp;
      // Display representative: minimal non-negative a in the class with
      // gcd(a, c) = 1.
      long a = a0;
      while (std::gcd(a, c) != 1) a += std::max(g, 1L);
      cusp.alpha = a;
      cusp.gamma = c;
      cusp.at_infinity = cusp_equivalent(N, 1, 0, a, c);
      // Congruence representative coprime to the level.
      long ka = (a == 0) ? 1 : a;
      while (std::gcd(ka, N) != 1) ka += std::max(g, 1L);
      cusp.kalpha = ka;
      cusp.kgamma = cusp.at_infinity ? N : c;
      cusp.width = cusp_width(N, cusp.kgamma);
      if (cusp.at_infinity) {
        cusp.scaling = {1, 0, 0, 1};
        cusp.kalpha = 1;
        cusp.alpha = 1;
        cusp.gamma = 0;  // display only; label() prints "inf"
      } else {
        long delta = mod_inverse(cusp.kalpha, N);
        long beta = (cusp.kalpha * delta - 1) / cusp.kgamma;
        cusp.scaling = {cusp.kalpha, beta, cusp.kgamma, delta};
      }
      G.cusps.push_back(cusp);
    }
  }
  std::stable_sort(G.cusps.begin(), G.cusps.end(),
                   [](const Cusp& u, const Cusp& v) {
                     if (u.at_infinity != v.at_infinity) return u.at_infinity;
                     if (u.kgamma != v.kgamma) return u.kgamma < v.kgamma;
                     return u.alpha < v.alpha;
                   });

  G.elliptic = elliptic_points(N, G.index);
  G.nu2 = std::count_if(G.elliptic.begin(), G.elliptic.end(),
                        [](const EllipticPoint& r) { return r.order == 2; });
  G.nu3 = static_cast<long>(G.elliptic.size()) - G.nu2;

  long nu_inf = static_cast<long>(G.cusps.size());
  long twelve_g = 12 + G.index - 3 * G.nu2 - 4 * G.nu3 - 6 * nu_inf;
  if (twelve_g % 12 || twelve_g < 0)
    throw numeric_guard("IllConditioned", "genus formula did not close");
  G.genus = twelve_g / 12;
  G.dim_weight2_cusp = G.genus;
  return G;
}

}  // namespace pmaass
