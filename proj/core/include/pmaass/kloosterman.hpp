#pragma once

#include <functional>
#include <vector>

#include "pmaass/arith.hpp"
#include "pmaass/numeric.hpp"

namespace pmaass {

// Classical sum over inverse pairs ad == 1 (mod c) of e((na + md)/c).
// The value is real; the imaginary part is asserted tiny and dropped.
double kloosterman(long m, long n, long c);

// Cusp-attached sum: over a mod (width*c) invertible mod c, d = a^{-1} mod c,
// subject to c == -a*alpha*gamma (mod N), of e_{width*c}(m*width*d + n*a).
// Definition-faithful double enumeration; complex in general.
cplx cusp_kloosterman(long N, const Cusp& cusp, long m, long n, long c);

// Same value through the width-splitting rewrite in terms of classical sums.
cplx cusp_kloosterman_via_classical(long N, const Cusp& cusp, long m, long n,
                                    long c);

// Ramanujan sum c_c(m) = K(m, 0; c), evaluated in closed form.
long ramanujan_sum(long m, long c);

// sum_{c >= 1, N | c} c_c(m) / c^s for m != 0, Re s > 1: the Euler product
// has finite local factors at p | N m against 1/zeta(s).
cplx ramanujan_dirichlet(long N, long m, cplx s);

// sum_{c >= 1, N | c} phi(c) / c^s  (the m = 0 line), Re s > 2.
cplx euler_phi_dirichlet(long N, cplx s);

// ---------------------------------------------------------------------------
// Batched sums over the modulus.
//
// Everything downstream needs sums of the shape
//     sum_{c == 0 mod N, c <= c_max} weight(c) * K(m, n; c)
// for many (m, n, weight) rows at once; the rows share each modulus's unit
// tables, which is where all the time goes.

struct KZRow {
  long m = 0, n = 0;
  std::function<double(long c)> weight;
  // Asymptotic decay weight(c) ~ const * c^{-tail_power}, used only for the
  // reported tail heuristic; 0 disables the report for the row.
  double tail_power = 0.0;
};

struct KZOptions {
  long c_max = 10000;
  int threads = 1;
  bool extended = false;
};

struct KZResult {
  std::vector<cplx> values;  // one per row
  std::vector<double> tails;  // Weil-heuristic scale of the discarded tail
  long c_count = 0;           // moduli actually summed
};

KZResult kloosterman_zeta(long N, const std::vector<KZRow>& rows,
                          const KZOptions& opt);

// Cusp-attached variant, summing weight(c) * K_{alpha,gamma}(m, n; c) over
// all c >= 1.  The cusp at infinity reduces to the classical restricted sum.
KZResult cusp_kloosterman_zeta(long N, const Cusp& cusp,
                               const std::vector<KZRow>& rows,
                               const KZOptions& opt);

}  // namespace pmaass
