#include "pmaass/basis.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pmaass/errors.hpp"
#include "pmaass/kloosterman.hpp"
#include "pmaass/special_functions.hpp"

namespace pmaass {

namespace {

cplx ipow(cplx b, int e) {
  if (e < 0) return 1.0 / ipow(b, -e);
  cplx r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Magnitude bound for D^r acting on (zfrak - conj(base))^2 e^{2 pi i m zfrak}
// and evaluating at the base point: each step multiplies the (2v0)^p-scaled
// coefficient by at most p + 4 pi |m| v0 with p <= 2 + 2i at step i.
double d_step_bound(long m, int r, double v0) {
  double b = 1.0;
  double mm = 4.0 * PI * std::abs(static_cast<double>(m)) * v0;
  for (int i = 0; i < r; ++i) b *= (2.0 + 2.0 * i) + mm;
  return b;
}

void check_base(const TermSum& ts, cplx tau0) {
  if (std::abs(ts.base - tau0) > 1e-12 * (1.0 + std::abs(tau0)))
    throw invalid_input("BasePointMismatch",
                        "operator base point differs from the term sum's");
}

}  // namespace

TermSum d_operator(const TermSum& ts, cplx tau0, int order) {
  if (order < 0)
    throw invalid_input("DomainError", "d_operator order must be >= 0");
  check_base(ts, tau0);
  double v0 = ts.base.imag();
  if (v0 <= 0.0)
    throw invalid_input("DomainError", "base point must be in the upper half plane");
  TermSum cur = ts;
  const cplx den(0.0, 2.0 * v0);
  for (int step = 0; step < order; ++step) {
    std::map<std::pair<int, long>, cplx> acc;
    for (const TermSum::Term& t : cur.terms) {
      if (t.p != 0)
        acc[{t.p + 1, t.m}] += t.coef * static_cast<double>(t.p) / den;
      if (t.m != 0)
        acc[{t.p + 2, t.m}] += t.coef * cplx(0.0, TWO_PI * t.m) / den;
    }
    cur.terms.clear();
    for (const auto& [key, coef] : acc)
      cur.terms.push_back({coef, key.first, key.second});
  }
  return cur;
}

cplx term_sum_eval(const TermSum& ts, cplx zfrak) {
  cplx wb = std::conj(ts.base);
  ComplexSum acc;
  for (const TermSum::Term& t : ts.terms)
    acc.add(t.coef * ipow(zfrak - wb, t.p) *
            std::exp(cplx(0.0, TWO_PI * t.m) * zfrak));
  return acc.value();
}

cplx evaluate_expansion(const FourierExpansion& fe, cplx z, bool* in_region) {
  if (in_region) *in_region = z.imag() > fe.valid_y;
  double le = static_cast<double>(fe.ell);
  ComplexSum acc;
  for (const auto& [n, c] : fe.hol)
    acc.add(c * std::exp(cplx(0.0, TWO_PI * n / le) * z));
  for (const auto& [n, c] : fe.antihol) {
    double gam = incomplete_gamma_int(1 - fe.kappa,
                                      4.0 * PI * std::abs(n) * z.imag() / le);
    acc.add(c * gam * std::exp(cplx(0.0, TWO_PI * n / le) * z));
  }
  return acc.value();
}

void add_scaled(FourierExpansion& a, const FourierExpansion& b, cplx scale) {
  bool same_cusp = a.base.at_infinity == b.base.at_infinity &&
                   (a.base.at_infinity ||
                    (a.base.alpha == b.base.alpha && a.base.gamma == b.base.gamma));
  if (!same_cusp || a.kappa != b.kappa || a.ell != b.ell)
    throw invalid_input("MixedExpansions",
                        "expansions disagree on cusp, weight, or width");
  double s = std::abs(scale);
  for (const auto& [n, c] : b.hol) a.hol[n] += scale * c;
  for (const auto& [n, c] : b.antihol) a.antihol[n] += scale * c;
  for (const auto& [n, t] : b.hol_tail) a.hol_tail[n] += s * t;
  for (const auto& [n, t] : b.antihol_tail) a.antihol_tail[n] += s * t;
  a.valid_y = std::max(a.valid_y, b.valid_y);
  a.c_max = std::min(a.c_max == 0 ? b.c_max : a.c_max, b.c_max);
  a.j_max = std::min(a.j_max == 0 ? b.j_max : a.j_max, b.j_max);
}

FourierExpansion maass_poincare_coeffs(long N, const Cusp& rho, long n,
                                       int kappa, long j_max, long c_max,
                                       int threads) {
  if (n >= 0) throw invalid_input("DomainError", "pole index must be negative");
  if (kappa > 0 || kappa % 2 != 0)
    throw invalid_input("DomainError", "weight must be even and <= 0");
  if (j_max < 0 || c_max < 1)
    throw invalid_input("DomainError", "cutoffs must be positive");
  double ell = static_cast<double>(rho.width);
  double an = static_cast<double>(-n);
  double xbase = 4.0 * PI * std::sqrt(an * std::max<long>(j_max, 1) / ell);
  if (xbase > 650.0)
    throw numeric_guard("BesselOverflow",
                        "|n| j_max too large for the I-Bessel weights");

  std::vector<KZRow> rows;
  {
    KZRow row;
    row.m = n;
    row.n = 0;
    double expo = 2.0 - kappa;
    row.weight = [expo](long c) {
      return std::pow(static_cast<double>(c), -expo);
    };
    row.tail_power = expo;
    rows.push_back(row);
  }
  for (long j = 1; j <= j_max; ++j) {
    KZRow row;
    row.m = n;
    row.n = j;
    double x = 4.0 * PI * std::sqrt(an * j / ell);
    int nu = 1 - kappa;
    row.weight = [x, nu](long c) {
      return bessel_i(nu, x / c) / static_cast<double>(c);
    };
    row.tail_power = 2.0 - kappa;
    rows.push_back(row);
  }
  KZOptions opt;
  opt.c_max = c_max;
  opt.threads = threads;
  KZResult kz = cusp_kloosterman_zeta(N, rho, rows, opt);

  GroupData gd = group_data(N);
  FourierExpansion fe;
  fe.base = gd.cusp_infinity();
  fe.kappa = kappa;
  fe.ell = 1;
  fe.c_max = c_max;
  fe.j_max = j_max;
  fe.valid_y = 0.0;

  // Both nonprincipal rows carry i^kappa; the kappa = -2 series must come out
  // as E_4 E_6 / Delta (the only weight -2 form with a simple pole at i
  // infinity), which fixes the sign, the c-power 2 - kappa, and the
  // 1/(1-kappa)! on the constant row.  At kappa = 0 the constant row then
  // telescopes to the classical 24 sigma_1(|n|).
  double sgn = ((-kappa / 2) % 2 == 0) ? 1.0 : -1.0;
  double c0 = sgn * std::pow(TWO_PI, 2.0 - kappa) * std::pow(ell, kappa - 1.0) *
              std::pow(an, 1.0 - kappa) / factorial(1 - kappa);
  fe.hol[0] = c0 * kz.values[0];
  fe.hol_tail[0] = std::abs(c0) * kz.tails[0];
  for (long j = 1; j <= j_max; ++j) {
    double cj = sgn * TWO_PI * std::pow(an / ell, (1.0 - kappa) / 2.0) *
                std::pow(static_cast<double>(j), (kappa - 1.0) / 2.0);
    fe.hol[j] += cj * kz.values[j];
    fe.hol_tail[j] += std::abs(cj) * kz.tails[j];
  }
  bool delta_inf = rho.at_infinity || cusp_equivalent(N, rho.alpha, rho.gamma, 1, 0);
  if (delta_inf) fe.hol[n] += 1.0;
  return fe;
}

FourierExpansion y_form_coeffs(long N, cplx tau0, long m, long j_max,
                               long c_max, double tol, int threads) {
  double v0 = tau0.imag();
  if (v0 <= 0.0)
    throw invalid_input("DomainError", "base point must be in the upper half plane");
  if (m >= 0) throw invalid_input("DomainError", "pole index must be negative");
  if (j_max < 0 || c_max < 1)
    throw invalid_input("DomainError", "cutoffs must be positive");
  int omega = elliptic_order(N, tau0);
  if (((m % omega) + omega) % omega != 0)
    throw invalid_input("CongruenceViolation",
                        "pole index must be divisible by the stabilizer order");
  int r = static_cast<int>(-m) - 1;
  if (r > 120)
    throw invalid_input("DomainError", "pole order too large for the operator power");

  GroupData gd = group_data(N);
  double mu = static_cast<double>(gd.index);
  double pref_mag = 1.0 / (2.0 * v0 * omega * factorial(r));
  cplx pref = -pref_mag;

  // Frequency cutoff: after D^r each row at frequency mf is bounded by
  // (2 v0)^2 d_step_bound(mf, r) e^{-2 pi mf v0} times the row scale, whose
  // largest Bessel factor sits at c = N.  The constant-row pieces are
  // covered by |sum_{N|c} c_c(mf)/c^2| <= sigma_1(mf) zeta(2)/N^2.
  auto row_bound = [&](long mf) {
    double bes = bessel_i(1, std::min(650.0,
        4.0 * PI * std::sqrt(static_cast<double>(mf) * std::max<long>(j_max, 1)) / N));
    double sig = static_cast<double>(sigma1(mf));
    double scale = 4.0 * PI * PI * std::sqrt(static_cast<double>(mf)) *
                       (1.0 + bes / N) +
                   8.0 * PI * PI * PI * mf * sig * 1.645 / (N * N) +
                   48.0 * PI * sig / mu;
    return pref_mag * 4.0 * v0 * v0 * d_step_bound(mf, r, v0) * scale *
           std::exp(-TWO_PI * mf * v0);
  };
  long m_cut = 2;
  double peak = static_cast<double>(r) / (TWO_PI * v0);
  while (m_cut < 2000 &&
         (static_cast<double>(m_cut) <= peak || row_bound(m_cut + 1) >= tol * 1e-2))
    ++m_cut;
  if (m_cut >= 2000)
    throw numeric_guard("CutoffOverflow",
                        "frequency cutoff did not converge; base point too low");
  if (j_max > 0 &&
      4.0 * PI * std::sqrt(static_cast<double>(m_cut) * j_max) / N > 650.0)
    throw numeric_guard("BesselOverflow",
                        "I-Bessel weight argument exceeds the stable range");

  // One Kloosterman batch for every (frequency, output index) pair.
  std::vector<KZRow> rows;
  for (long j = 1; j <= j_max; ++j)
    for (long mf = 1; mf <= m_cut; ++mf) {
      double x = 4.0 * PI * std::sqrt(static_cast<double>(mf) * j);
      KZRow irow;
      irow.m = mf;
      irow.n = -j;
      irow.weight = [x](long c) {
        return bessel_i(1, x / c) / static_cast<double>(c);
      };
      irow.tail_power = 2.0;
      rows.push_back(irow);
      KZRow jrow;
      jrow.m = mf;
      jrow.n = j;
      jrow.weight = [x](long c) {
        return bessel_j1(x / c) / static_cast<double>(c);
      };
      jrow.tail_power = 2.0;
      rows.push_back(jrow);
    }
  KZOptions opt;
  opt.c_max = c_max;
  opt.threads = threads;
  KZResult kz = kloosterman_zeta(N, rows, opt);
  auto kz_at = [&](long j, long mf, bool jrow) -> std::size_t {
    return static_cast<std::size_t>(((j - 1) * m_cut + (mf - 1)) * 2 + (jrow ? 1 : 0));
  };

  FourierExpansion fe;
  fe.base = gd.cusp_infinity();
  fe.kappa = 0;
  fe.ell = 1;
  fe.c_max = c_max;
  fe.j_max = j_max;
  fe.valid_y = v0 + 2.0 / v0;

  auto finish = [&](const TermSum& ts) {
    return pref * term_sum_eval(d_operator(ts, tau0, r), tau0);
  };
  auto tail_of = [&](long mf, double err) {
    return pref_mag * 4.0 * v0 * v0 * d_step_bound(mf, r, v0) *
           std::exp(-TWO_PI * mf * v0) * err;
  };
  double omit = row_bound(m_cut + 1) * 2.0;

  // j = 0: the constant kernel row plus the frequency-only rows, with the
  // 1/zfrak_2 pieces of the kernel and the weight-2 completion cancelled
  // symbolically (only the holomorphic Eisenstein part survives).
  {
    TermSum ts;
    ts.base = tau0;
    ts.terms.push_back({cplx(TWO_PI - TWO_PI / mu), 2, 0});
    for (long mf = 1; mf <= m_cut; ++mf) {
      cplx zm = ramanujan_dirichlet(N, mf, cplx(2.0, 0.0));
      cplx coef = -8.0 * PI * PI * PI * static_cast<double>(mf) * zm +
                  48.0 * PI * static_cast<double>(sigma1(mf)) / mu;
      ts.terms.push_back({coef, 2, mf});
    }
    fe.hol[0] = finish(ts);
    fe.hol_tail[0] = omit;
  }
  // The Bessel rows enter with a minus sign: the kernel contour integral
  // evaluates to -2 pi c sqrt(m/|n|) I_1 (resp. J_1), checked by direct
  // quadrature of int e^{-2 pi i (m w + n/(c^2 w))} w^{-2} dw.
  for (long j = 1; j <= j_max; ++j) {
    TermSum ts;
    ts.base = tau0;
    ts.terms.push_back({cplx(TWO_PI), 2, -j});
    double tail = omit;
    for (long mf = 1; mf <= m_cut; ++mf) {
      double sc = -4.0 * PI * PI * std::sqrt(static_cast<double>(mf) / j);
      ts.terms.push_back({sc * kz.values[kz_at(j, mf, false)], 2, mf});
      tail += tail_of(mf, std::abs(sc) * kz.tails[kz_at(j, mf, false)]);
    }
    fe.hol[j] = finish(ts);
    fe.hol_tail[j] = tail;
  }
  for (long n = 1; n <= j_max; ++n) {
    TermSum ts;
    ts.base = tau0;
    ts.terms.push_back({cplx(TWO_PI), 2, n});
    double tail = omit;
    for (long mf = 1; mf <= m_cut; ++mf) {
      double sc = -4.0 * PI * PI * std::sqrt(static_cast<double>(mf) / n);
      ts.terms.push_back({sc * kz.values[kz_at(n, mf, true)], 2, mf});
      tail += tail_of(mf, std::abs(sc) * kz.tails[kz_at(n, mf, true)]);
    }
    fe.antihol[-n] = finish(ts);
    fe.antihol_tail[-n] = tail;
  }
  return fe;
}

FourierExpansion assemble(const PrincipalPartSpec& spec, long j_max,
                          long c_max, double tol, int threads) {
  if (spec.weight > 0 || spec.weight % 2 != 0)
    throw invalid_input("DomainError", "weight must be even and <= 0");
  if (spec.weight != 0 && !spec.elliptic_parts.empty())
    throw invalid_input("DomainError",
                        "elliptic principal parts are supported at weight 0 only");
  for (std::size_t i = 0; i < spec.elliptic_parts.size(); ++i) {
    const auto& ei = spec.elliptic_parts[i];
    if (ei.tau.imag() <= 0.0)
      throw invalid_input("DomainError", "elliptic point below the real axis");
    if (ei.omega != 0 && ei.omega != elliptic_order(spec.N, ei.tau))
      throw invalid_input("OmegaMismatch",
                          "declared stabilizer order disagrees with the level");
    for (std::size_t l = i + 1; l < spec.elliptic_parts.size(); ++l)
      if (point_equivalent(spec.N, ei.tau, spec.elliptic_parts[l].tau))
        throw invalid_input("EquivalentPoints",
                            "elliptic base points lie in one orbit");
  }

  GroupData gd = group_data(spec.N);
  FourierExpansion fe;
  fe.base = gd.cusp_infinity();
  fe.kappa = spec.weight;
  fe.ell = 1;
  fe.c_max = c_max;
  fe.j_max = j_max;
  for (const auto& part : spec.cusp_parts)
    for (const auto& [n, a] : part.terms) {
      if (n >= 0)
        throw invalid_input("DomainError", "cusp principal indices must be negative");
      if (a == 0.0) continue;
      add_scaled(fe,
                 maass_poincare_coeffs(spec.N, part.cusp, n, spec.weight,
                                       j_max, c_max, threads),
                 a);
    }
  for (const auto& part : spec.elliptic_parts)
    for (const auto& [n, b] : part.terms) {
      if (b == 0.0) continue;
      add_scaled(fe,
                 y_form_coeffs(spec.N, part.tau, n, j_max, c_max, tol, threads),
                 b);
    }
  return fe;
}

}  // namespace pmaass
