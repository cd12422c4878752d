#include "pmaass/kloosterman.hpp"

#include <cmath>
#include <numeric>

#include "pmaass/errors.hpp"

namespace pmaass {

namespace {

// Units mod c paired with their inverses, by batch inversion: one extended
// Euclid for the product of all units, then back-substitution.
struct UnitTable {
  long c = 1;
  std::vector<long> unit, inv;

  explicit UnitTable(long modulus) : c(modulus) {
    if (c == 1) {
      unit = {0};
      inv = {0};
      return;
    }
    std::vector<char> coprime(c, 1);
    long rest = c;
    for (long p = 2; p * p <= rest; ++p) {
      if (rest % p) continue;
      while (rest % p == 0) rest /= p;
      for (long k = 0; k < c; k += p) coprime[k] = 0;
    }
    if (rest > 1)
      for (long k = 0; k < c; k += rest) coprime[k] = 0;
    for (long a = 1; a < c; ++a)
      if (coprime[a]) unit.push_back(a);
    inv.resize(unit.size());
    std::vector<long> prefix(unit.size());
    long run = 1;
    for (size_t i = 0; i < unit.size(); ++i) {
      prefix[i] = run;
      run = (run * unit[i]) % c;  // c <= ~1e6 keeps products in range
    }
    long run_inv = mod_inverse(run, c);
    for (size_t i = unit.size(); i-- > 0;) {
      inv[i] = (prefix[i] * run_inv) % c;
      run_inv = (run_inv * unit[i]) % c;
    }
  }
};

struct PhaseTable {
  std::vector<double> cos_, sin_;
  explicit PhaseTable(long c) : cos_(c), sin_(c) {
    for (long k = 0; k < c; ++k) {
      double t = TWO_PI * static_cast<double>(k) / static_cast<double>(c);
      cos_[k] = std::cos(t);
      sin_[k] = std::sin(t);
    }
  }
  cplx operator[](long k) const { return {cos_[k], sin_[k]}; }
};

long reduce_mod(long x, long c) {
  long r = x % c;
  return r < 0 ? r + c : r;
}

cplx kloosterman_with_tables(long m, long n, long c, const UnitTable& units,
                             const PhaseTable& phases) {
  if (c == 1) return 1.0;
  long mr = reduce_mod(m, c), nr = reduce_mod(n, c);
  double sr = 0.0, si = 0.0;
  for (size_t i = 0; i < units.unit.size(); ++i) {
    long idx = (nr * units.unit[i] + mr * units.inv[i]) % c;
    sr += phases.cos_[idx];
    si += phases.sin_[idx];
  }
  return {sr, si};
}

}  // namespace

double kloosterman(long m, long n, long c) {
  if (c < 1) throw invalid_input("DomainError", "modulus must be positive");
  if (c == 1) return 1.0;
  UnitTable units(c);
  PhaseTable phases(c);
  cplx v = kloosterman_with_tables(m, n, c, units, phases);
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())) + 1e-10)
    throw numeric_guard("IllConditioned",
                        "classical Kloosterman sum came out non-real");
  return v.real();
}

cplx cusp_kloosterman(long N, const Cusp& cusp, long m, long n, long c) {
  if (c < 1) throw invalid_input("DomainError", "modulus must be positive");
  long ell = cusp.width, alpha = cusp.kalpha, gamma = cusp.kgamma;
  long lc = ell * c;
  if (lc > 4000000)
    throw numeric_guard("IllConditioned",
                        "direct cusp Kloosterman enumeration too large");
  UnitTable units(c);
  PhaseTable phases(lc);
  // a runs over lifts of each unit mod c to residues mod ell*c; the level
  // congruence c == -a*alpha*gamma (N) filters lifts individually.
  ComplexSum acc;
  long mr = reduce_mod(m, lc), nr = reduce_mod(n, lc);
  for (size_t i = 0; i < units.unit.size(); ++i) {
    long a0 = units.unit[i];
    long d = units.inv[i];
    long base = reduce_mod(mr * ell % lc * d, lc);
    for (long t = 0; t < ell; ++t) {
      long a = a0 + t * c;
      if ((c + a % N * alpha % N * gamma) % N != 0) continue;
      long idx = (base + nr * (a % lc)) % lc;
      acc.add(phases[idx]);
    }
  }
  return acc.value();
}

cplx cusp_kloosterman_via_classical(long N, const Cusp& cusp, long m, long n,
                                    long c) {
  if (c < 1) throw invalid_input("DomainError", "modulus must be positive");
  long alpha = cusp.kalpha, gamma = cusp.kgamma;
  if (c % gamma) return 0.0;
  EllSplit sp = ell_splits(cusp.width, gamma, N);
  long L = sp.ell1 * c;
  if (std::gcd(sp.ell2, L) != 1) return 0.0;
  // Phase in front: e_{ell2}(-[ell1 gamma alpha]_{ell2} n).
  long pre_inv =
      sp.ell2 == 1
          ? 0
          : mod_inverse(reduce_mod(sp.ell1 % sp.ell2 * (gamma % sp.ell2) %
                                       sp.ell2 * (alpha % sp.ell2),
                                   sp.ell2),
                        sp.ell2);
  cplx phase0 = root_of_unity(-pre_inv * reduce_mod(n, sp.ell2), sp.ell2);
  // First slot of the classical sum: ell1*[ell2]_{ell1 c} * m.
  long i2 = mod_inverse(sp.ell2, L);
  long m_arg = reduce_mod(sp.ell1 % L * i2, L);
  m_arg = reduce_mod(m_arg * reduce_mod(m, L), L);
  long inv_r = sp.n1 == 1
                   ? 0
                   : mod_inverse(reduce_mod(sp.ell2 % sp.n1 * (alpha % sp.n1),
                                            sp.n1),
                                 sp.n1);
  long step = L / sp.n1;  // ell1*c / n1, integral by construction
  if (step * sp.n1 != L)
    throw numeric_guard("IllConditioned", "width splitting inconsistency");
  UnitTable units(L);
  PhaseTable phases(L);
  ComplexSum acc;
  for (long r = 0; r < sp.n1; ++r) {
    cplx ph = root_of_unity(r * inv_r % sp.n1 * (c / gamma), sp.n1);
    cplx K = kloosterman_with_tables(m_arg, n + step * r, L, units, phases);
    acc.add(ph * K);
  }
  return phase0 * acc.value() / static_cast<double>(sp.n1);
}

long ramanujan_sum(long m, long c) {
  if (c < 1) throw invalid_input("DomainError", "modulus must be positive");
  long g = std::gcd(std::abs(m), c);
  if (g == c) return totient(c);
  // Hoelder: c_c(m) = mu(c/g) phi(c) / phi(c/g); zero when c/g is not
  // squarefree.
  long q = c / g;
  int mu = moebius(q);
  if (mu == 0) return 0;
  return mu * (totient(c) / totient(q));
}

cplx ramanujan_dirichlet(long N, long m, cplx s) {
  if (m == 0)
    throw invalid_input("DomainError",
                        "m = 0 line is euler_phi_dirichlet, not this");
  if (N < 1) throw invalid_input("InvalidLevel", "level must be positive");
  if (s.real() <= 1.0)
    throw invalid_input("DomainError", "series needs Re s > 1");
  long mm = std::abs(m);
  // Local factor at p: sum over e >= v_p(N) of c_{p^e}(m) p^{-es}, which
  // terminates at e = v_p(m) + 1; Euler product over remaining primes gives
  // 1/zeta(s).
  cplx value = 1.0 / zeta(s);
  Factorization fn = factorize(std::lcm(N, mm));
  for (auto [p, e_lcm] : fn.primes) {
    (void)e_lcm;
    int a = 0;
    for (long q = N; q % p == 0; q /= p) ++a;
    int mu_p = 0;
    for (long q = mm; q % p == 0; q /= p) ++mu_p;
    cplx ps = std::exp(-s * std::log(static_cast<double>(p)));
    cplx local = 0.0;
    for (int e = a; e <= mu_p + 1; ++e) {
      double ce;  // c_{p^e}(p^{mu_p} * unit)
      if (e == 0)
        ce = 1.0;
      else if (e <= mu_p)
        ce = std::pow(static_cast<double>(p), e - 1) * (p - 1);
      else
        ce = -std::pow(static_cast<double>(p), mu_p);
      local += ce * std::pow(ps, e);
    }
    value *= local / (1.0 - ps);
  }
  return value;
}

cplx euler_phi_dirichlet(long N, cplx s) {
  if (N < 1) throw invalid_input("InvalidLevel", "level must be positive");
  if (s.real() <= 2.0)
    throw invalid_input("DomainError", "series needs Re s > 2");
  cplx value = zeta(s - 1.0) / zeta(s);
  value *= static_cast<double>(totient(N)) *
           std::exp(-s * std::log(static_cast<double>(N)));
  for (auto [p, e] : factorize(N).primes) {
    (void)e;
    cplx ps = std::exp(-s * std::log(static_cast<double>(p)));
    value /= 1.0 - ps;
  }
  return value;
}

namespace {

double tail_heuristic(long N, long m, long n, double power, long c_max,
                      double w_edge) {
  if (power <= 1.6) return INFINITY;
  long g0 = std::gcd(std::abs(m), std::abs(n));
  double g = std::sqrt(static_cast<double>(std::max(g0, 1L)));
  double C = static_cast<double>(c_max);
  // |K(m,n;c)| <~ tau(c) sqrt(gcd(m,n,c)) sqrt(c); integrate the envelope
  // |w| ~ w_edge (c/c_max)^{-power} against modulus density 1/N.
  double expo = power - 1.5;
  return std::abs(w_edge) * 2.0 * std::log(C + 2.0) * g * C * std::sqrt(C) /
         (N * expo);
}

}  // namespace

KZResult kloosterman_zeta(long N, const std::vector<KZRow>& rows,
                          const KZOptions& opt) {
  if (N < 1) throw invalid_input("InvalidLevel", "level must be positive");
  KZResult out;
  out.values.assign(rows.size(), 0.0);
  out.tails.assign(rows.size(), 0.0);
  std::vector<long> moduli;
  for (long c = N; c <= opt.c_max; c += N) moduli.push_back(c);
  out.c_count = static_cast<long>(moduli.size());
  if (moduli.empty()) return out;

  const long chunk = 16;
  long nblocks = (static_cast<long>(moduli.size()) + chunk - 1) / chunk;
  std::vector<std::vector<cplx>> partial(
      nblocks, std::vector<cplx>(rows.size(), 0.0));
  parallel_blocks(nblocks, opt.threads, [&](long b) {
    std::vector<ComplexSum> acc(rows.size(), ComplexSum(opt.extended));
    long lo = b * chunk;
    long hi = std::min<long>(lo + chunk, moduli.size());
    for (long i = lo; i < hi; ++i) {
      long c = moduli[i];
      UnitTable units(c);
      PhaseTable phases(c);
      for (size_t r = 0; r < rows.size(); ++r) {
        double w = rows[r].weight ? rows[r].weight(c) : 1.0;
        if (w == 0.0) continue;
        cplx K =
            kloosterman_with_tables(rows[r].m, rows[r].n, c, units, phases);
        acc[r].add(w * K);
      }
    }
    for (size_t r = 0; r < rows.size(); ++r) partial[b][r] = acc[r].value();
  });
  for (size_t r = 0; r < rows.size(); ++r) {
    std::vector<cplx> column(nblocks);
    for (long b = 0; b < nblocks; ++b) column[b] = partial[b][r];
    out.values[r] = sum_ascending(column, opt.extended);
    if (rows[r].tail_power > 0.0) {
      double w_edge = rows[r].weight ? rows[r].weight(opt.c_max) : 1.0;
      out.tails[r] = tail_heuristic(N, rows[r].m, rows[r].n,
                                    rows[r].tail_power, opt.c_max, w_edge);
    }
  }
  return out;
}

KZResult cusp_kloosterman_zeta(long N, const Cusp& cusp,
                               const std::vector<KZRow>& rows,
                               const KZOptions& opt) {
  if (cusp.kgamma == N) {
    // K_{1,N}(m, n; c) equals the classical sum for N | c and vanishes
    // otherwise, so the restricted classical machinery applies unchanged.
    return kloosterman_zeta(N, rows, opt);
  }
  KZResult out;
  out.values.assign(rows.size(), 0.0);
  out.tails.assign(rows.size(), 0.0);
  std::vector<long> moduli;
  for (long c = cusp.kgamma; c <= opt.c_max; c += cusp.kgamma)
    moduli.push_back(c);  // gamma | c is necessary for a nonzero sum
  out.c_count = static_cast<long>(moduli.size());
  if (moduli.empty()) return out;
  const long chunk = 8;
  long nblocks = (static_cast<long>(moduli.size()) + chunk - 1) / chunk;
  std::vector<std::vector<cplx>> partial(
      nblocks, std::vector<cplx>(rows.size(), 0.0));
  parallel_blocks(nblocks, opt.threads, [&](long b) {
    std::vector<ComplexSum> acc(rows.size(), ComplexSum(opt.extended));
    long lo = b * chunk;
    long hi = std::min<long>(lo + chunk, moduli.size());
    for (long i = lo; i < hi; ++i) {
      long c = moduli[i];
      for (size_t r = 0; r < rows.size(); ++r) {
        double w = rows[r].weight ? rows[r].weight(c) : 1.0;
        if (w == 0.0) continue;
        cplx K = cusp_kloosterman_via_classical(N, cusp, rows[r].m, rows[r].n,
                                                c);
        acc[r].add(w * K);
      }
    }
    for (size_t r = 0; r < rows.size(); ++r) partial[b][r] = acc[r].value();
  });
  for (size_t r = 0; r < rows.size(); ++r) {
    std::vector<cplx> column(nblocks);
    for (long b = 0; b < nblocks; ++b) column[b] = partial[b][r];
    out.values[r] = sum_ascending(column, opt.extended);
    if (rows[r].tail_power > 0.0) {
      double w_edge = rows[r].weight ? rows[r].weight(opt.c_max) : 1.0;
      out.tails[r] = tail_heuristic(1, rows[r].m, rows[r].n,
                                    rows[r].tail_power, opt.c_max, w_edge);
    }
  }
  return out;
}

}  // namespace pmaass
