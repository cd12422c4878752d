#pragma once

#include <functional>
#include <map>
#include <vector>

#include "pmaass/numeric.hpp"

namespace pmaass {

// Pointwise evaluator of a form, in whichever variable the caller fixes.
using PointFn = std::function<cplx(cplx)>;

// The Moebius coordinate X_zh(z) = (z - zh)/(z - conj(zh)) taking the upper
// half-plane to the unit disk centered at zh.  Defined for z != conj(zh);
// |X| < 1 exactly when z lies in the upper half-plane.
cplx xmap(cplx zh, cplx z);

// ---------------------------------------------------------------------------
// Elliptic expansions around an interior point.
//
// A weight 2-2k harmonic function near zh splits as
//
//   F(z) = (z - conj(zh))^{2k-2} [ sum_n a_n X^n
//            + sum_{n <= -1} b_n beta(r^2; -n, 2k-1) X^n ]
//
// with X = xmap(zh, z), r = |X|, and beta the incomplete beta integral.  A
// third branch with radial factors beta(1 - r^2; 2k-1, -n) at 0 <= n <= n0
// exists in general but vanishes on the subspace the library certifies; its
// presence is detected (the two extraction radii then disagree at n >= 0)
// and reported rather than folded into a_n.

struct EllipticExpansion {
  cplx center;
  long k = 1;      // the expansion weight is 2 - 2k
  long omega = 1;  // stabilizer order; recorded for congruence checks only
  std::map<long, cplx> a;  // meromorphic-part coefficients
  std::map<long, cplx> b;  // beta-part coefficients, n <= -1 only
  double r_used = 0.0;
};

// Coefficients for n_min <= n <= n_max by angular discrete Fourier analysis
// of F(z) (z - conj(zh))^{2-2k} on the circles |X| = r and |X| = r/2.  The
// two radii separate a_n from b_n through the beta radial factors, which are
// monotone in r.  Extraction of the beta branch (n_min < 0) needs k >= 1.
// Errors: invalid_input("DomainError") for a bad center, radius, or range;
// numeric_guard("IllConditioned") when a radial 2x2 system has condition
// number above 1e6; numeric_guard("NotInCuspSubspace") when the radii
// disagree at some n >= 0 beyond sep_tol, the signature of the third branch.
EllipticExpansion elliptic_coeffs(const PointFn& F, cplx zh, long k,
                                  long n_min, long n_max, double r,
                                  int angles = 256, int threads = 1,
                                  double sep_tol = 1e-6, long omega = 1);

// Elliptic coefficients of a holomorphic weight 2k form given by its
// q-expansion g(z) = sum_m q_coeffs[m] e^{2 pi i m z}:
//
//   g(z) = (z - conj(zh))^{-2k} sum_{n >= 0} a(n) X_zh^n(z),
//
// computed through the closed term algebra by iterating d/dX at X = 0.
// Returns a(0..n_max).
std::vector<cplx> cusp_form_elliptic_coeffs(const std::vector<double>& q_coeffs,
                                            cplx zh, long k, long n_max);

// xi_kappa F = 2i y^kappa conj(dF/dconj(z)) by central differences with one
// Richardson step.  h = 0 picks the default 1e-3 min(1, y).  Throws
// numeric_guard("StepTooLarge") when halving the step moves the estimate by
// more than half of itself plus the roundoff floor.
cplx xi_numeric(const PointFn& F, double kappa, cplx z, double h = 0.0);

// The weight kappa hyperbolic Laplacian
//   -y^2 (F_xx + F_yy) + i kappa y (F_x + i F_y)
// by a 9-point stencil (center, four at distance h, four at h/2) with one
// Richardson step; same step policy and guard as xi_numeric.
cplx laplacian_numeric(const PointFn& F, double kappa, cplx z, double h = 0.0);

// (2 pi i)^{-1} times the integral of F around the circle |w - z0| = radius,
// by trapezoid sums starting at 2^9 points and doubling until two successive
// refinements agree to 1e-8 absolutely.  Samples are reused across doublings
// and summed in angle order, so the value is thread-count independent.
// Throws numeric_guard("ContourHitsPole") on a non-finite sample or when the
// doubling cap is hit without settling.
cplx residue_in_zhbar(const PointFn& F, cplx z0, double radius,
                      int threads = 1);

}  // namespace pmaass
