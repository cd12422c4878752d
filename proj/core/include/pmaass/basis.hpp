#pragma once

#include <map>
#include <vector>

#include "pmaass/arith.hpp"
#include "pmaass/numeric.hpp"

namespace pmaass {

// ---------------------------------------------------------------------------
// Closed term algebra for the uniformizer derivative.
//
// A TermSum holds sum_i coef_i (zfrak - conj(base))^{p_i} e^{2 pi i m_i zfrak}
// anchored at one base point.  Expansions toward a cusp carry rows with
// negative frequency (e^{-2 pi i j zfrak}), so m ranges over all integers.
// With X = (zfrak - base)/(zfrak - conj(base)), the chain rule d/dX =
// (zfrak - conj(base))^2/(2i Im base) d/dzfrak acts termwise in closed form,
// raising p by one or two and preserving m.

struct TermSum {
  struct Term {
    cplx coef;
    int p = 0;
    long m = 0;
  };
  cplx base;
  std::vector<Term> terms;
};

// D^order with D = d/dX as above, terms collected by (p, m) in a fixed order.
// Throws invalid_input("BasePointMismatch") when tau0 is not the stored base.
TermSum d_operator(const TermSum& ts, cplx tau0, int order);

// Value of the sum at zfrak.
cplx term_sum_eval(const TermSum& ts, cplx zfrak);

// ---------------------------------------------------------------------------
// Fourier expansions at a cusp.
//
// hol maps n to the coefficient of e^{2 pi i n z / ell}; negative n entries
// form the principal part.  antihol maps n < 0 to the coefficient of
// Gamma(1 - kappa, 4 pi |n| y / ell) e^{2 pi i n z / ell}, the decaying
// harmonic completion (for kappa = 0 that factor is e^{-4 pi |n| y}, i.e. the
// entry multiplies e^{2 pi i |n| conj(z) / ell} up to sign bookkeeping).
// Tail maps carry truncation estimates for the matching coefficient; the
// expansion represents the form only for y > valid_y.

struct FourierExpansion {
  Cusp base;
  int kappa = 0;
  long ell = 1;
  std::map<long, cplx> hol;
  std::map<long, cplx> antihol;
  std::map<long, double> hol_tail;
  std::map<long, double> antihol_tail;
  long c_max = 0;
  long j_max = 0;
  double valid_y = 0.0;
};

// Resummation at z (the local coordinate of the base cusp).  When in_region
// is non-null it receives z.imag() > valid_y; the value is returned even
// outside the region, where it need not equal the form.
cplx evaluate_expansion(const FourierExpansion& fe, cplx z,
                        bool* in_region = nullptr);

// a += scale * b coefficientwise; tails add with |scale|.  The expansions
// must agree on base cusp, weight, and width
// (invalid_input("MixedExpansions")), and the validity region shrinks to the
// larger valid_y.
void add_scaled(FourierExpansion& a, const FourierExpansion& b, cplx scale);

// ---------------------------------------------------------------------------
// Principal-part data for assembly.

struct PrincipalPartSpec {
  long N = 1;
  int weight = 0;  // 2 - 2k, even and <= 0
  struct CuspPart {
    Cusp cusp;
    std::map<long, cplx> terms;  // n < 0 -> a_cusp(n)
  };
  struct EllipticPart {
    cplx tau;
    long omega = 0;  // stabilizer order; 0 = derive from (N, tau)
    std::map<long, cplx> terms;  // n < 0, n == k-1 mod omega -> b_tau(n)
  };
  std::vector<CuspPart> cusp_parts;
  std::vector<EllipticPart> elliptic_parts;
};

// Expansion at i(infinity) of the weight-kappa cusp Poincare series with
// principal part e^{2 pi i n z / ell_rho} at the cusp rho: the constant term
// is a Kloosterman zeta value and the j >= 1 coefficients are I-Bessel
// weighted Kloosterman sums.  The antiholomorphic part is not populated (no
// closed coefficient formula is carried for it); pointwise access to the
// non-meromorphic part goes through numeric differentiation instead.
FourierExpansion maass_poincare_coeffs(long N, const Cusp& rho, long n,
                                       int kappa, long j_max, long c_max,
                                       int threads = 1);

// Expansion at i(infinity) of the weight-0 series with principal part
// X_{tau0}^m(z) at z = tau0: the m = -1 kernel rows come from the resummed
// weight-2 realization, higher pole orders apply D^{-m-1}.  Requires
// m == 0 mod omega_{tau0} (invalid_input("CongruenceViolation")); valid for
// y > Im tau0 + 2/Im tau0.
FourierExpansion y_form_coeffs(long N, cplx tau0, long m, long j_max,
                               long c_max, double tol = 1e-9, int threads = 1);

// Linear combination over the spec's cusp and elliptic parts.  Checks the
// spec invariants (pairwise inequivalent elliptic points, congruence via
// y_form_coeffs, elliptic parts only at weight 0) and propagates component
// errors; the validity region is the intersection of the components'.
FourierExpansion assemble(const PrincipalPartSpec& spec, long j_max,
                          long c_max, double tol = 1e-9, int threads = 1);

}  // namespace pmaass
