#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pmaass/arith.hpp"
#include "pmaass/basis.hpp"
#include "pmaass/numeric.hpp"

namespace pmaass {

// Weight 2k cusp form carrying the expansion data the pairing consumes.
struct CuspFormData {
  long level = 1;
  long weight = 2;  // 2k
  // Coefficient of e^{2 pi i m z} at i(infinity); slot 0 is zero.
  std::vector<double> q_coeffs;
  // Coefficients at each cusp class, keyed by Cusp::label(): slot m
  // multiplies e^{2 pi i m z / width} in the slash of the form by that
  // class's scaling matrix.
  std::map<std::string, std::vector<cplx>> cusp_coeffs;
};

// The normalized generator of the weight 2 level 11 cusp space,
// eta(z)^2 eta(11 z)^2, with n_cut coefficients at each of the two cusps.
// The expansion at the zero class follows from the eta inversion formula:
// slot m there is -(1/11) e^{2 pi i m / 11} times the slot at infinity.
CuspFormData cusp_form_11(long n_cut = 240);

// g at z.  The point is first moved to its highest translate under the
// group of the form's level, so the series at i(infinity) converges at a
// useful rate even near the real line.
cplx cusp_form_eval(const CuspFormData& g, cplx z);

// Elliptic coefficients a_{g,tau}(0..n_max) of g around tau, in the
// normalization g(z) = (z - conj(tau))^{-2k} sum_n a(n) X_tau^n(z).
std::vector<cplx> cusp_form_elliptic(const CuspFormData& g, cplx tau,
                                     long n_max);

// Pairing of g against the harmonic form described by spec:
//
//   {g, F} = (pi / mu_N) sum_tau (1 / (tau_2 omega_tau))
//                sum_{n >= 1} b_tau(-n) a_{g,tau}(n - 1)
//          + (1 / mu_N) sum_rho sum_{n >= 1} a_rho(-n) a_{g,rho}(n),
//
// where the b and a coefficients are the spec's principal parts.  The cusp
// sum needs g's expansion at every cusp the spec touches; a missing or too
// short table raises invalid_input("MissingExpansion").
cplx bruinier_funke_pairing(const CuspFormData& g,
                            const PrincipalPartSpec& spec);

// Left-hand side of the principal part condition,
//
//   (2 pi i)^{-1} sum_rho sum_{n > 0} a_rho(-n) a_{g,rho}(n)
//     + sum_tau (2 i tau_2 omega_tau)^{-1}
//           sum_{n > 0} b_tau(-n) a_{g,tau}(n - 1),
//
// which is (mu_N / (2 pi i)) {g, F}.  The described form is meromorphic
// exactly when this vanishes for every cusp form of the level.
cplx principal_part_condition(const PrincipalPartSpec& spec,
                              const CuspFormData& g);

struct CertificateParams {
  double pairing_tol = 1e-8;  // residual threshold per basis form
  double antihol_tol = 1e-3;  // relative threshold for the expansion check
  double tail_guard = 3.0;    // slack factor over the recorded truncation
  long j_max = 5;             // antiholomorphic slots 1..j_max inspected
  long c_max = 400;           // truncation for the assembled expansion
  double tol = 1e-9;          // series tolerance passed to assembly
  int threads = 1;
};

struct MeromorphyReport {
  long level = 1;
  bool passes = false;          // every residual below pairing_tol
  bool antihol_vanish = false;  // every slot consistent with zero
  std::vector<cplx> residuals;  // one per basis cusp form
  std::vector<double> antihol_mag;    // |antihol(-n)|, n = 1..j_max
  std::vector<double> antihol_ratio;  // antihol_mag / scale
  std::vector<double> antihol_noise;  // truncation noise floor per slot
  // Largest antiholomorphic slot among the spec's summands taken alone:
  // the ratios measure how completely the combination cancels.
  double scale = 0.0;
};

// Decides meromorphy of the form described by spec two ways: the principal
// part condition against the shipped cusp-form basis, and the
// antiholomorphic slots of the assembled expansion at i(infinity).  A slot
// counts as vanishing when it stays below antihol_tol times the
// single-summand scale or below tail_guard times its noise floor,
// whichever is larger; the noise floor is the slot's largest movement
// across the truncations c_max/4, c_max/2, c_max, so a slot that is pure
// truncation residue is recognized as zero without an a-priori error
// bound.  The
// check reads the rows the assembly carries; elliptic poles fill them in
// closed form while cusp poles carry none, so specs with cusp poles are
// decided by the residuals alone.  Levels with a shipped basis: 1 and 11
// (invalid_input("UnsupportedLevel") otherwise).
MeromorphyReport meromorphy_certificate(const PrincipalPartSpec& spec,
                                        const CertificateParams& params = {});

struct PeterssonParams {
  long samples = 20000;
  unsigned long seed = 20240822;
  int threads = 1;
};

// Monte-Carlo estimate of (g, h) = (1 / mu_N) int_{Gamma_0(N) \ H}
// g conj(h) y^{2k} dmu for weight-2k forms given as pointwise evaluators.
// Samples the modular fundamental domain with the invariant measure and
// translates by coset representatives; the level must be 1 or prime
// (representatives are enumerated directly), and fewer than 1000 samples
// raise invalid_input("BudgetTooSmall").  Deterministic for a fixed seed
// and independent of the thread count.
cplx petersson_inner_numeric(const std::function<cplx(cplx)>& g,
                             const std::function<cplx(cplx)>& h, long N,
                             long weight,
                             const PeterssonParams& params = {});

// Coefficients of the weight-2 cusp form xi_0(F) as a q-series in the width
// of fe's base cusp: slot j multiplies e^{2 pi i j z / ell}.  Each
// antiholomorphic row Gamma(1, 4 pi n y / ell) e^{-2 pi i n z / ell}
// contributes -(4 pi n / ell) times its conjugated coefficient; holomorphic
// rows are annihilated.  The output converges on all of H even though fe
// itself only represents the form high in the cusp.
std::vector<cplx> xi_image_qseries(const FourierExpansion& fe, long j_max);

}  // namespace pmaass
