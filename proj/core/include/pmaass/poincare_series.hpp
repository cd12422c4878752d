#pragma once

#include "pmaass/numeric.hpp"

namespace pmaass {

// Evaluation of the level-N weight-0 Poincare kernel
//     P_{N,s}(zf, z) = sum_{M in Gamma_0(N)} phi_s(M zf, z) / (j(M,zf)^2 |j(M,zf)|^{2s})
// and of its value at s = 0 through the analytic continuation
//     y Psi_{2,N}(zf, z) = Sigma_1 + Sigma_2 + Sigma_3,
// where Sigma_1 collects the c = 0 translates in closed cotangent form,
// Sigma_2 the c >= 1 matrices paired against their a/c counterterms, and
// Sigma_3 the counterterms continued into an exponentially convergent
// Kloosterman-sum Fourier series plus the m = n = 0 zeta term.

struct PsiEvalParams {
  long c_max = 200;  // modulus cutoff for matrix sums and Fourier c-sums
  long n_max = 0;    // z-side Fourier cutoff; 0 derives it from tol and y
  long m_max = 0;    // zf-side Fourier cutoff; 0 derives it from tol and zf_2
  long k_max = 48;   // d-window scale (|d| <= k_max * c) and translate range
  double tol = 1e-9;
  int threads = 1;
  bool extended = false;  // double-double accumulators in the big sums
};

struct PointPair {
  cplx zfrak;  // the pole-side variable zf = zf_1 + i zf_2
  cplx z;      // the evaluation variable z = x + iy
};

// phi_s(zf, z) = y^{1+s} (zf-z)^{-1} (zf-zbar)^{-1} |zf-zbar|^{-2s}.
// Throws numeric_guard("PoleHit") when |zf - z| < tol.
cplx phi_s(cplx zfrak, cplx z, cplx s, double tol = 1e-12);

// min |M zf - z| over the enumerated matrices; the separation predicate
// requires this to exceed 10 * tol before any kernel evaluation.
double orbit_separation(long N, const PointPair& pair, const PsiEvalParams& params);

// g_n(w1, w2) = int_R (w1+t)^{-1} (w2+t)^{-1} e^{-2 pi i n t} dt for
// w2 in the upper half plane and w1 off the real line, by residues:
//   n <= 0, w1 in H:      0
//   n <= 0, w1 in -H:     2 pi i (w2-w1)^{-1} e^{2 pi i n w1}
//   n  > 0, w1 in -H:     2 pi i (w2-w1)^{-1} e^{2 pi i n w2}
//   n  > 0, w1 in H\{w2}: 2 pi i (w2-w1)^{-1} (e^{2 pi i n w2} - e^{2 pi i n w1})
//   n  > 0, w1 = w2:      -4 pi^2 n e^{2 pi i n w1}
cplx g_n(long n, cplx w1, cplx w2);

// The m = n = 0 term of the continued Sigma_3: in closed form
//   -(2 pi/(1+s)) G(s)^2 y^{-s} zf_2^{-1-2s}
//       * (phi(N)/N^{2+2s}) prod_{p|N} (1-p^{-2-2s})^{-1}
//       * s zeta(2s+1) / zeta(2s+2),
// with G(s) = Gamma(1/2+s)/Gamma(1+s); the s zeta(2s+1) factor is evaluated
// through its limit 1/2 at s = 0, where the value reduces to c_N / zf_2.
cplx zeta_term(long N, cplx s, double zfrak2, double y);

// Sigma_1 at s = 0: -i pi [cot(pi(zf-z)) - cot(pi(zf-zbar))].
cplx sum1_s0(const PointPair& pair, double tol = 1e-9);

// Sigma_2 at s = 0: blocks over coprime (c,d), N | c, c <= c_max,
// |d| <= k_max * c, with the translate sum over upper rows a = a0 + kc done
// exactly by the same cotangent identity:
//   block(c,d) = -i pi [br(M0 zf) - br(a0/c)] / j^2,
//   br(w) = cot(pi(w-z)) - cot(pi(w-zbar)),  M0 zf = a0/c - 1/(c j).
cplx sum2_s0(long N, const PointPair& pair, const PsiEvalParams& params);

// Sigma_3 at s = 0: c_N/zf_2 - 8 pi^3 sum_{m>=1} m e^{2 pi i m zf} [
//   sum_{n<=0} Z_{m,n} e^{-2 pi i n z} + sum_{n>=1} Z_{m,n} e^{-2 pi i n zbar}],
// Z_{m,n} = sum_{N|c} K(m,n;c)/c^2; the n = 0 line uses the closed-form
// Ramanujan Dirichlet series, the rest a batched Kloosterman zeta.
cplx sum3_s0(long N, const PointPair& pair, const PsiEvalParams& params);

// sum1_s0 + sum2_s0 + sum3_s0.
cplx y_psi2(long N, const PointPair& pair, const PsiEvalParams& params);

struct DirectSum {
  cplx value;
  double tail = 0.0;  // crude scale of the discarded terms
};

// Truncated defining sum, valid only in the absolute-convergence region
// Re s > 0 (throws invalid_input("ConvergenceRegion") otherwise).
// Enumeration: c = 0 translates, then ascending c = N, 2N, ..., coprime d
// with |d| <= k_max * c, balanced a0 = d^{-1} mod c, translates |k| <= k_max.
DirectSum direct_poincare(long N, cplx s, const PointPair& pair,
                          const PsiEvalParams& params);

// Same value with the k-, d-, and c-tails completed analytically: translate
// tails by binomial expansion against Hurwitz-type power tails, out-of-window
// d through the Moebius-filtered lattice tail of the k-integral
// int phi_s(t,z) dt, and c > c_max through the closed form of
// sum_{N|c} phi(c) c^{-2-2s}.  Oscillatory corrections of size
// O(e^{-2 pi y}) enter the reported tail only.
DirectSum direct_poincare_converged(long N, cplx s, const PointPair& pair,
                                    const PsiEvalParams& params);

// General real s > 0 versions of the three pieces of the continuation,
// for cross-validation against direct_poincare_converged:
//   sum1_s: the c = 0 translates with their |.|^{-2s} weight, tail-completed;
//   sum2_s: the paired matrix sum with the j^2 |j|^{2s} weight, windowed in
//           (c, d, k) with translate tails on both members of each pair;
//   sum3_s: the continued counterterm sum, with exact factors on the m = 0
//           and n = 0 lines and contour-shifted quadratures for the rest.
cplx sum1_s(const PointPair& pair, double s, const PsiEvalParams& params);
cplx sum2_s(long N, const PointPair& pair, double s, const PsiEvalParams& params);
cplx sum3_s(long N, const PointPair& pair, double s, const PsiEvalParams& params);

// Petersson's absolutely convergent kernel for weight 2k >= 4:
//   Psi_{2k,N}(zf, z) = sum_M (M zf - z)^{-1} (M zf - zbar)^{1-2k} j(M,zf)^{-2k},
// truncated over the direct_poincare enumeration.
cplx psi2k_direct(long N, int k, const PointPair& pair, const PsiEvalParams& params);

}  // namespace pmaass
