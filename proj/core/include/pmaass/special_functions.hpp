#pragma once

#include "pmaass/numeric.hpp"

namespace pmaass {

// Modified Bessel I_nu for integer nu >= 0 by the ascending series (all
// terms positive, no cancellation).  x in [0, ~700).
double bessel_i(int nu, double x);

// Bessel J_1: Taylor series up to |x| = 12, Miller backward recurrence
// beyond (normalized by J_0 + 2 J_2 + 2 J_4 + ... = 1).
double bessel_j1(double x);

// Incomplete gamma Gamma(s, y) for integer s >= 1, y >= 0: closed form
// (s-1)! e^{-y} sum_{j<s} y^j / j!.
double incomplete_gamma_int(int s, double y);

// Incomplete beta integral int_0^y t^{a-1} (1-t)^{b-1} dt for 0 <= y <= 1,
// a > 0.  b may be <= 0 when y < 1; y = 1 needs b > 0.
double incomplete_beta(double y, double a, double b);

// Dedekind eta, E_2, and its weight-2 completion E_2(tau) - 3/(pi Im tau).
cplx eta(cplx tau);
cplx eisenstein_e2(cplx tau);
cplx e2_hat(cplx tau);

// Principal-branch log Gamma (Lanczos), and the ratio
// Gamma(1/2 + s)/Gamma(1 + s) that the continuation formulas carry around.
cplx log_gamma(cplx z);
cplx gamma_ratio_half(cplx s);

}  // namespace pmaass
