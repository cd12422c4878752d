#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "pmaass/numeric.hpp"

namespace pmaass {

// ---------------------------------------------------------------------------
// Elementary arithmetic.

struct Factorization {
  // (prime, exponent) pairs, primes ascending.
  std::vector<std::pair<long, int>> primes;
};

Factorization factorize(long n);  // n >= 1
long totient(long n);
int moebius(long n);
long sigma1(long n);  // sum of divisors
std::vector<long> divisors(long n);  // ascending

// Inverse of a mod m in [0, m); m >= 1 (m == 1 returns 0).  Throws
// invalid_input("NotInvertible") when gcd(a, m) > 1.
long mod_inverse(long a, long m);

struct Rational {
  long num = 0, den = 1;  // reduced, den > 0
  double value() const { return static_cast<double>(num) / den; }
};

// ---------------------------------------------------------------------------
// Gamma_0(N) data.

struct Cusp {
  long alpha = 0, gamma = 1;  // display representative alpha/gamma, lowest terms
  bool at_infinity = false;
  // Representative used in exponential-sum congruences: kalpha/kgamma with
  // gcd(kalpha, N) = 1, kgamma | N.  Infinity carries (1, N).
  long kalpha = 1, kgamma = 1;
  long width = 1;
  // Scaling matrix [[a, b], [g, d]], det 1, sending infinity to the cusp;
  // identity for the cusp at infinity, first column (kalpha, kgamma) else.
  std::array<long, 4> scaling = {1, 0, 0, 1};
  std::string label() const;  // "inf" or "alpha/gamma"
};

struct EllipticPoint {
  cplx tau;   // representative in the upper half plane
  int order;  // 2 or 3
};

struct GroupData {
  long level = 1;
  long index = 1;               // [SL2(Z) : Gamma_0(N)]
  Rational c_constant;          // -6 / index
  std::vector<Cusp> cusps;      // infinity first, then ascending denominator
  std::vector<EllipticPoint> elliptic;  // order 2 reps first, then order 3
  long nu2 = 0, nu3 = 0;
  long genus = 0;
  long dim_weight2_cusp = 0;    // dim S_2(Gamma_0(N)) = genus
  const Cusp& cusp_infinity() const { return cusps.front(); }
  const Cusp* find_cusp(const std::string& label) const;
};

GroupData group_data(long N);

// Exact test for Gamma_0(N)-equivalence of the cusps a1/c1 and a2/c2
// (fractions need not be reduced; c = 0 means infinity).
bool cusp_equivalent(long N, long a1, long c1, long a2, long c2);

// Do the points lie in one Gamma_0(N) orbit?  Exact: candidate matrices are
// reconstructed from the pair and verified in integer arithmetic.
bool point_equivalent(long N, cplx z1, cplx z2);

// Order of the stabilizer of tau in Gamma_0(N)/{±I}: 2 or 3 at an elliptic
// point, 1 otherwise.
int elliptic_order(long N, cplx tau);

// Width-splitting data attached to a cusp denominator gamma | N:
//   ell = ell1 * ell2 with ell1 supported on the primes of gamma and
//         gcd(ell2, gamma) = 1;
//   N/gamma = n1 * ell2;
//   ell1 * gamma = a1 * a2 with a1 supported on the primes of n1 and
//         gcd(a2, n1) = 1 (n1 = 1 forces a1 = 1, a2 = ell1 * gamma).
struct EllSplit {
  long ell = 1, ell1 = 1, ell2 = 1, n1 = 1, a1 = 1, a2 = 1;
};

// ell must be the width of the cusp class of gamma (taken as an input so the
// splitting is a pure factorization). Throws invalid_input("InvalidCuspData")
// when gamma does not divide N or ell2 inferred from ell fails to divide
// N/gamma.
EllSplit ell_splits(long ell, long gamma, long N);

// Convenience: width of the cusp class with denominator gamma | N.
long cusp_width(long N, long gamma);

}  // namespace pmaass
