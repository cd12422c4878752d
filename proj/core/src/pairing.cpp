#include "pmaass/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pmaass/analysis.hpp"
#include "pmaass/errors.hpp"

namespace pmaass {

namespace {

cplx ipow(cplx b, long e) {
  if (e < 0) return 1.0 / ipow(b, -e);
  cplx r = 1.0;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// u, v with x u + y v = gcd(x, y).
void egcd(long x, long y, long& u, long& v) {
  u = 1;
  v = 0;
  long u1 = 0, v1 = 1;
  while (y) {
    long q = x / y;
    long t = x - q * y;
    x = y;
    y = t;
    t = u - q * u1;
    u = u1;
    u1 = t;
    t = v - q * v1;
    v = v1;
    v1 = t;
  }
}

void check_compatible(const CuspFormData& g, const PrincipalPartSpec& spec) {
  if (g.level != spec.N)
    throw invalid_input("LevelMismatch",
                        "cusp form level does not match the spec level");
  if (g.weight + spec.weight != 2)
    throw invalid_input("WeightMismatch",
                        "pairing needs weights 2k and 2 - 2k");
}

// The two double sums every pairing formula is built from: the cusp sum
// sum_rho sum_{n >= 1} a_rho(-n) a_{g,rho}(n) and the elliptic sum
// sum_tau (1 / (tau_2 omega_tau)) sum_{n >= 1} b_tau(-n) a_{g,tau}(n - 1).
void pairing_sums(const CuspFormData& g, const PrincipalPartSpec& spec,
                  cplx& cusp_sum, cplx& elliptic_sum) {
  check_compatible(g, spec);

  ComplexSum cs;
  for (const auto& part : spec.cusp_parts) {
    auto it = g.cusp_coeffs.find(part.cusp.label());
    if (it == g.cusp_coeffs.end())
      throw invalid_input("MissingExpansion",
                          "no expansion of the cusp form at cusp " +
                              part.cusp.label());
    const std::vector<cplx>& table = it->second;
    for (const auto& [m, coef] : part.terms) {
      if (m >= 0) continue;
      long n = -m;
      if (n >= static_cast<long>(table.size()))
        throw invalid_input("MissingExpansion",
                            "expansion at cusp " + part.cusp.label() +
                                " is shorter than the principal part needs");
      cs.add(coef * table[n]);
    }
  }
  cusp_sum = cs.value();

  ComplexSum es;
  for (const auto& part : spec.elliptic_parts) {
    long omega = part.omega > 0 ? part.omega
                                : elliptic_order(spec.N, part.tau);
    long n_need = 0;
    for (const auto& [m, coef] : part.terms)
      if (m < 0) n_need = std::max(n_need, -m);
    if (n_need == 0) continue;
    std::vector<cplx> a = cusp_form_elliptic(g, part.tau, n_need - 1);
    ComplexSum one;
    for (const auto& [m, coef] : part.terms)
      if (m < 0) one.add(coef * a[-m - 1]);
    es.add(one.value() / (part.tau.imag() * static_cast<double>(omega)));
  }
  elliptic_sum = es.value();
}

}  // namespace

CuspFormData cusp_form_11(long n_cut) {
  if (n_cut < 8) throw invalid_input("InvalidCutoff", "n_cut must be >= 8");
  // q prod (1 - q^n)^2 (1 - q^{11 n})^2: multiply the factors into a length
  // n_cut table, then shift by the leading q.
  std::vector<long long> P(n_cut, 0);
  P[0] = 1;
  for (long n = 1; n < n_cut; ++n) {
    for (int rep = 0; rep < 2; ++rep)
      for (long i = n_cut - 1; i >= n; --i) P[i] -= P[i - n];
    if (11 * n < n_cut)
      for (int rep = 0; rep < 2; ++rep)
        for (long i = n_cut - 1; i >= 11 * n; --i) P[i] -= P[i - 11 * n];
  }

  CuspFormData g;
  g.level = 11;
  g.weight = 2;
  g.q_coeffs.assign(n_cut + 1, 0.0);
  for (long m = 1; m <= n_cut; ++m)
    g.q_coeffs[m] = static_cast<double>(P[m - 1]);

  std::vector<cplx> at_inf(g.q_coeffs.begin(), g.q_coeffs.end());
  g.cusp_coeffs["inf"] = at_inf;

  // Slash by the zero-class scaling matrix [[1,0],[1,1]]: the eta inversion
  // formula turns g into -(1/11) g((z + 1)/11), so slot m picks up the
  // eleventh root of unity e(m/11) and the factor -1/11.
  std::vector<cplx> at_zero(n_cut + 1, 0.0);
  for (long m = 1; m <= n_cut; ++m)
    at_zero[m] = -(1.0 / 11.0) * root_of_unity(m, 11) * g.q_coeffs[m];
  g.cusp_coeffs["0/1"] = at_zero;
  return g;
}

cplx cusp_form_eval(const CuspFormData& g, cplx z) {
  double y = z.imag();
  if (!(y > 0.0))
    throw invalid_input("DomainError", "evaluation point must satisfy y > 0");

  // Pick the group translate of largest height: minimize |c z + d|^2 over
  // c = 0 mod level, gcd(c, d) = 1.
  long N = g.level;
  long best_c = 0, best_d = 1;
  double best_q = 1.0;
  long c_bound = std::min(static_cast<long>(std::ceil(1.0 / y)) + N,
                          static_cast<long>(1000000));
  for (long c = N; c <= c_bound; c += N) {
    double cy = static_cast<double>(c) * y;
    if (cy * cy >= best_q) break;
    long d0 = std::lround(-static_cast<double>(c) * z.real());
    for (long d = d0 - 2; d <= d0 + 2; ++d) {
      if (std::gcd(c, std::abs(d)) != 1) continue;
      double t = static_cast<double>(c) * z.real() + static_cast<double>(d);
      double q = t * t + cy * cy;
      if (q < best_q) {
        best_q = q;
        best_c = c;
        best_d = d;
      }
    }
  }

  cplx w = z;
  cplx jfac = 1.0;
  if (best_c != 0) {
    long u, v;
    egcd(best_d, best_c, u, v);  // d u + c v = 1
    long a = u, b = -v;          // a d - b c = 1
    jfac = static_cast<double>(best_c) * z + static_cast<double>(best_d);
    w = (static_cast<double>(a) * z + static_cast<double>(b)) / jfac;
  }

  double maxa = 0.0;
  for (double c : g.q_coeffs) maxa = std::max(maxa, std::abs(c));
  cplx qbase = std::exp(cplx(0.0, TWO_PI) * w);
  cplx qpow = 1.0;
  ComplexSum acc;
  for (std::size_t m = 1; m < g.q_coeffs.size(); ++m) {
    qpow *= qbase;
    if (g.q_coeffs[m] != 0.0) acc.add(g.q_coeffs[m] * qpow);
    if (maxa * std::abs(qpow) < 1e-18) break;
  }
  return ipow(jfac, -g.weight) * acc.value();
}

std::vector<cplx> cusp_form_elliptic(const CuspFormData& g, cplx tau,
                                     long n_max) {
  return cusp_form_elliptic_coeffs(g.q_coeffs, tau, g.weight / 2, n_max);
}

cplx bruinier_funke_pairing(const CuspFormData& g,
                            const PrincipalPartSpec& spec) {
  cplx cusp_sum, elliptic_sum;
  pairing_sums(g, spec, cusp_sum, elliptic_sum);
  double mu = static_cast<double>(group_data(spec.N).index);
  return (PI / mu) * elliptic_sum + cusp_sum / mu;
}

cplx principal_part_condition(const PrincipalPartSpec& spec,
                              const CuspFormData& g) {
  cplx cusp_sum, elliptic_sum;
  pairing_sums(g, spec, cusp_sum, elliptic_sum);
  return cusp_sum / cplx(0.0, TWO_PI) + elliptic_sum / cplx(0.0, 2.0);
}

MeromorphyReport meromorphy_certificate(const PrincipalPartSpec& spec,
                                        const CertificateParams& params) {
  if (spec.N != 1 && spec.N != 11)
    throw invalid_input("UnsupportedLevel",
                        "cusp form bases ship for levels 1 and 11 only");

  MeromorphyReport rep;
  rep.level = spec.N;

  std::vector<CuspFormData> basis;
  if (spec.N == 11) basis.push_back(cusp_form_11());

  rep.passes = true;
  for (const CuspFormData& g : basis) {
    cplx r = principal_part_condition(spec, g);
    rep.residuals.push_back(r);
    if (!(std::abs(r) < params.pairing_tol)) rep.passes = false;
  }

  FourierExpansion fe = assemble(spec, params.j_max, params.c_max, params.tol,
                                 params.threads);
  // Antiholomorphic slots converge through slowly fluctuating Kloosterman
  // partial sums, so a single halving can understate the truncation error;
  // the floor takes the larger movement across two halvings.
  FourierExpansion fe_half =
      assemble(spec, params.j_max, std::max<long>(params.c_max / 2, 1),
               params.tol, params.threads);
  FourierExpansion fe_quarter =
      assemble(spec, params.j_max, std::max<long>(params.c_max / 4, 1),
               params.tol, params.threads);

  // Cancellation scale: each summand of the spec assembled on its own.
  rep.scale = 0.0;
  auto part_scale = [&](const PrincipalPartSpec& one) {
    FourierExpansion pf = assemble(one, params.j_max, params.c_max,
                                   params.tol, params.threads);
    for (long n = 1; n <= params.j_max; ++n) {
      auto it = pf.antihol.find(-n);
      if (it != pf.antihol.end())
        rep.scale = std::max(rep.scale, std::abs(it->second));
    }
  };
  for (const auto& part : spec.cusp_parts) {
    if (part.terms.empty()) continue;
    PrincipalPartSpec one;
    one.N = spec.N;
    one.weight = spec.weight;
    one.cusp_parts.push_back(part);
    part_scale(one);
  }
  for (const auto& part : spec.elliptic_parts) {
    if (part.terms.empty()) continue;
    PrincipalPartSpec one;
    one.N = spec.N;
    one.weight = spec.weight;
    one.elliptic_parts.push_back(part);
    part_scale(one);
  }

  rep.antihol_vanish = true;
  for (long n = 1; n <= params.j_max; ++n) {
    auto pick = [n](const FourierExpansion& e) {
      auto it = e.antihol.find(-n);
      return it == e.antihol.end() ? cplx(0.0) : it->second;
    };
    cplx slot = pick(fe);
    double mag = std::abs(slot);
    double noise = std::max(std::abs(slot - pick(fe_half)),
                            std::abs(pick(fe_half) - pick(fe_quarter)));
    double ratio;
    if (rep.scale > 0.0)
      ratio = mag / rep.scale;
    else
      ratio = mag > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    rep.antihol_mag.push_back(mag);
    rep.antihol_ratio.push_back(ratio);
    rep.antihol_noise.push_back(noise);
    double allowed = std::max(params.antihol_tol * rep.scale,
                              params.tail_guard * noise);
    if (!(mag <= allowed)) rep.antihol_vanish = false;
  }
  return rep;
}

cplx petersson_inner_numeric(const std::function<cplx(cplx)>& g,
                             const std::function<cplx(cplx)>& h, long N,
                             long weight, const PeterssonParams& params) {
  if (params.samples < 1000)
    throw invalid_input("BudgetTooSmall",
                        "at least 1000 samples are needed for a stable "
                        "fundamental domain average");
  if (N < 1) throw invalid_input("InvalidLevel", "level must be positive");
  if (N > 1) {
    auto f = factorize(N).primes;
    bool prime = f.size() == 1 && f.begin()->second == 1;
    if (!prime)
      throw invalid_input("UnsupportedLevel",
                          "coset representatives are enumerated for level 1 "
                          "and prime levels only");
  }

  // Samples live in the strip |x| <= 1/2, y > y0 carrying the measure
  // y0 dmu; points below |z| = 1 fall outside the modular fundamental
  // domain and contribute zero.  All randomness is drawn up front so the
  // estimate does not depend on the thread count.
  const double y0 = std::sqrt(3.0) / 2.0;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<cplx> pts(params.samples);
  for (long i = 0; i < params.samples; ++i) {
    double x = unif(rng) - 0.5;
    double u = unif(rng);
    pts[i] = cplx(x, y0 / (1.0 - u));
  }

  std::vector<cplx> reps;  // bottom rows (c, d) of coset representatives
  reps.emplace_back(0.0, 1.0);
  // For prime N the nontrivial classes are S T^j, j = 0..N-1, with bottom
  // row (1, j).
  if (N > 1)
    for (long j = 0; j < N; ++j) reps.emplace_back(1.0, j);

  double mu = static_cast<double>(group_data(N).index);
  long nblocks = std::min<long>(64, params.samples);
  std::vector<cplx> parts(nblocks, 0.0);
  parallel_blocks(nblocks, params.threads, [&](long b) {
    long lo = b * params.samples / nblocks;
    long hi = (b + 1) * params.samples / nblocks;
    ComplexSum acc;
    for (long i = lo; i < hi; ++i) {
      cplx z = pts[i];
      if (std::norm(z) < 1.0) continue;
      for (const cplx& r : reps) {
        cplx w = z;
        if (r.real() != 0.0) w = -1.0 / (z + r.imag());
        cplx val = g(w) * std::conj(h(w)) *
                   std::pow(w.imag(), static_cast<double>(weight));
        acc.add(val);
      }
    }
    parts[b] = acc.value();
  });
  cplx total = sum_ascending(parts);
  return total / (mu * y0 * static_cast<double>(params.samples));
}

std::vector<cplx> xi_image_qseries(const FourierExpansion& fe, long j_max) {
  if (j_max < 0) throw invalid_input("InvalidCutoff", "j_max must be >= 0");
  std::vector<cplx> out(j_max + 1, 0.0);
  double ell = static_cast<double>(fe.ell);
  for (long j = 1; j <= j_max; ++j) {
    auto it = fe.antihol.find(-j);
    if (it == fe.antihol.end()) continue;
    double fac =
        -std::pow(2.0 * TWO_PI * static_cast<double>(j) / ell,
                  1.0 - static_cast<double>(fe.kappa));
    out[j] = fac * std::conj(it->second);
  }
  return out;
}

}  // namespace pmaass
