#include "pmaass/poincare_series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pmaass/arith.hpp"
#include "pmaass/errors.hpp"
#include "pmaass/kloosterman.hpp"
#include "pmaass/special_functions.hpp"

namespace pmaass {

namespace {

const cplx kI(0.0, 1.0);

// cot(pi w) through the decaying exponential on either side of the real
// axis; never forms e^{2 pi |Im w|}.
cplx cot_pi(cplx w) {
  if (w.imag() > 0.0) {
    cplx q = std::exp(cplx(0.0, TWO_PI) * w);
    return kI * (1.0 + q) / (q - 1.0);
  }
  cplx q = std::exp(cplx(0.0, -TWO_PI) * w);
  return kI * (1.0 + q) / (1.0 - q);
}

// Distance from w to the nearest integer translate of the origin.
double lattice_distance(cplx w) {
  return std::abs(w - std::round(w.real()));
}

cplx pow_real_base(double b, cplx e) { return std::exp(e * std::log(b)); }

// int_R phi_s(t, z) dt = y^{-s} sqrt(pi) Gamma(1/2+s)/Gamma(1+s).
cplx phi_line_integral(double y, cplx s) {
  return pow_real_base(y, -s) * std::sqrt(PI) * gamma_ratio_half(s);
}

// int_R (zf+w)^{-2-s} (zfbar+w)^{-s} dw = -(sqrt(pi)/(1+s)) G(s) s zf2^{-1-2s}.
cplx petersson_w_integral(double zf2, cplx s) {
  return -(std::sqrt(PI) / (1.0 + s)) * gamma_ratio_half(s) * s *
         pow_real_base(zf2, -1.0 - 2.0 * s);
}

// ---------------------------------------------------------------------------
// Translate tails.
//
// Every lattice tail below has the shape
//   sum_{k > K} (k+P)^{-1} (k+Q)^{-1} ((k + Re R)^2 + (Im R)^2)^{-s}.
// The quadratic is kept real so no branch of a complex power is ever
// crossed; expanding each factor in 1/k reduces the sum to power tails
// sum_{k>K} k^{-2-2s-r}, which only depend on (s, K, r) and are shared
// across all (P, Q, R) at the same window.

struct TailTable {
  double K = 0.0;
  cplx s;
  std::vector<cplx> ptail;  // ptail[r] = sum_{k>K} k^{-2-2s-r}
};

TailTable make_tail_table(cplx s, double K, int orders) {
  TailTable t;
  t.K = K;
  t.s = s;
  t.ptail.reserve(orders);
  for (int r = 0; r < orders; ++r)
    t.ptail.push_back(power_tail(2.0 + 2.0 * s + static_cast<double>(r), K));
  return t;
}

// One-sided tail at the table's window.  abs_goal stops the expansion once
// the running term drops below it; the shift/window ratio is kept small by
// every caller, so the series converges geometrically.
cplx translate_tail(const TailTable& t, cplx P, cplx Q, cplx R,
                    double abs_goal) {
  const int orders = static_cast<int>(t.ptail.size());
  double rho = std::max({std::abs(P), std::abs(Q), std::abs(R)}) / (t.K + 1.0);
  if (rho > 0.45)
    throw numeric_guard("TailRatio",
                        "translate window too small for the shifts");
  double a2 = 2.0 * R.real();
  double b2 = std::norm(R);
  // Coefficients of (1+Pt)^{-1}(1+Qt)^{-1} and of (1+a2 t+b2 t^2)^{-s}.
  std::vector<cplx> ab(orders), qs(orders);
  {
    std::vector<cplx> pa(orders), pb(orders);
    cplx va = 1.0, vb = 1.0;
    for (int r = 0; r < orders; ++r) {
      pa[r] = va;
      pb[r] = vb;
      va *= -P;
      vb *= -Q;
    }
    for (int r = 0; r < orders; ++r) {
      cplx acc = 0.0;
      for (int i = 0; i <= r; ++i) acc += pa[i] * pb[r - i];
      ab[r] = acc;
    }
  }
  qs[0] = 1.0;
  for (int r = 0; r + 1 < orders; ++r) {
    cplx next = -(a2 * (static_cast<double>(r) + t.s) * qs[r] +
                  (r >= 1 ? b2 * (static_cast<double>(r) - 1.0 + 2.0 * t.s) *
                                qs[r - 1]
                          : cplx(0.0)));
    qs[r + 1] = next / (static_cast<double>(r) + 1.0);
  }
  cplx total = 0.0;
  int quiet = 0;
  for (int r = 0; r < orders; ++r) {
    cplx gamma = 0.0;
    for (int i = 0; i <= r; ++i) gamma += ab[i] * qs[r - i];
    cplx term = gamma * t.ptail[r];
    total += term;
    if (std::abs(term) < abs_goal) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
  }
  return total;
}

// sum_{|k| > K} phi_s(k + w0, z) from the table's window.
cplx phi_translate_tails(const TailTable& t, cplx w0, cplx z, cplx y1s,
                         double abs_goal) {
  cplx A = w0 - z;
  cplx B = w0 - std::conj(z);
  cplx pos = translate_tail(t, A, B, B, abs_goal);
  cplx neg = translate_tail(t, -A, -B, -std::conj(B), abs_goal);
  return y1s * (pos + neg);
}

// sum_{k > K} (k+W)^{-p} for integer p >= 2, by the binomial series in W/k.
cplx inverse_power_tail(int p, cplx W, double K) {
  if (std::abs(W) / (K + 1.0) > 0.45)
    throw numeric_guard("TailRatio", "inverse power window too small");
  cplx total = 0.0, wr = 1.0;
  double binom = 1.0;  // binom(p+r-1, r) with alternating sign folded in
  for (int r = 0; r < 40; ++r) {
    cplx term = binom * wr * power_tail(static_cast<double>(p + r), K);
    total += term;
    if (r > 2 && std::abs(term) < 1e-18 * (1.0 + std::abs(total))) break;
    wr *= -W;
    binom *= static_cast<double>(p + r) / static_cast<double>(r + 1);
  }
  return total;
}

// sum_{k > K} (k+A)^{-1} (k+B)^{-p} for integer p >= 1.
cplx product_inverse_tail(cplx A, cplx B, int p, double K) {
  if (std::max(std::abs(A), std::abs(B)) / (K + 1.0) > 0.45)
    throw numeric_guard("TailRatio", "product inverse window too small");
  const int orders = 40;
  std::vector<cplx> ga(orders), gb(orders);
  cplx ar = 1.0, br = 1.0;
  double binom = 1.0;
  for (int r = 0; r < orders; ++r) {
    ga[r] = ar;
    gb[r] = binom * br;
    ar *= -A;
    br *= -B;
    binom *= static_cast<double>(p + r) / static_cast<double>(r + 1);
  }
  cplx total = 0.0;
  for (int r = 0; r < orders; ++r) {
    cplx gamma = 0.0;
    for (int i = 0; i <= r; ++i) gamma += ga[i] * gb[r - i];
    cplx term = gamma * power_tail(static_cast<double>(1 + p + r), K);
    total += term;
    if (r > 2 && std::abs(term) < 1e-18 * (1.0 + std::abs(total))) break;
  }
  return total;
}

cplx int_pow(cplx b, int e) {
  cplx out = 1.0;
  for (int i = 0; i < e; ++i) out *= b;
  return out;
}

// ---------------------------------------------------------------------------
// Oscillatory line integrals for the general-s Sigma_3.

// int_{-L}^{L} f(u) e^{-i omega u} du plus integration-by-parts tails for
// both half lines; f must be smooth and algebraically decaying.
cplx oscillatory_line_integral(const std::function<cplx(double)>& f, double L,
                               double omega, double tol) {
  cplx core = integrate_adaptive(
      [&](double u) {
        return f(u) * std::exp(cplx(0.0, -omega * u));
      },
      -L, L, tol);
  const cplx iw(0.0, omega);
  const double h = 0.05;
  auto d1 = [&](double u) { return (f(u + h) - f(u - h)) / (2.0 * h); };
  auto d2 = [&](double u) {
    return (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h);
  };
  cplx tail_pos = std::exp(cplx(0.0, -omega * L)) *
                  (f(L) / iw + d1(L) / (iw * iw) + d2(L) / (iw * iw * iw));
  cplx tail_neg = std::exp(cplx(0.0, omega * L)) *
                  (-f(-L) / iw + d1(-L) / (iw * iw) - d2(-L) / (iw * iw * iw));
  return core + tail_pos + tail_neg;
}

// t-integral int_R phi_s(t,z) e^{-2 pi i n t} dt, n != 0, by shifting the
// contour 0.9 y toward the decaying side.  On the real line
// phi_s(t,z) = y^{1+s} ((t-x)^2+y^2)^{-1-s}, whose analytic continuation
// between the two branch cuts (horizontal rays from z and zbar) is
// y^{1+s} (t-z)^{-1-s} (t-zbar)^{-1-s} in principal powers.
cplx t_integral(long n, cplx z, cplx s, double tol) {
  double y = z.imag();
  if (n == 0) return phi_line_integral(y, s);
  double delta = -0.9 * y * (n > 0 ? 1.0 : -1.0);
  cplx y1s = pow_real_base(y, 1.0 + s);
  auto f = [&](double u) {
    cplx tt(u, delta);
    return y1s * std::pow(tt - z, -1.0 - s) *
           std::pow(tt - std::conj(z), -1.0 - s);
  };
  double L = std::max(40.0, std::abs(z.real()) + 30.0);
  double omega = TWO_PI * static_cast<double>(n);
  cplx val = oscillatory_line_integral(f, L, omega, tol);
  return val * std::exp(TWO_PI * static_cast<double>(n) * delta);
}

// w-integral int_R (zf+w)^{-2-s} (zfbar+w)^{-s} e^{-2 pi i m w} dw, m != 0,
// shifted 0.9 zf2 toward the decaying side (the branch cuts sit at
// Im w = -zf2 and Im w = +zf2).
cplx w_integral(long m, cplx zf, cplx s, double tol) {
  double zf2 = zf.imag();
  if (m == 0) return petersson_w_integral(zf2, s);
  double delta = -0.9 * zf2 * (m > 0 ? 1.0 : -1.0);
  auto f = [&](double u) {
    cplx w(u, delta);
    return std::pow(zf + w, -2.0 - s) * std::pow(std::conj(zf) + w, -s);
  };
  double L = std::max(40.0, std::abs(zf.real()) + 30.0);
  double omega = TWO_PI * static_cast<double>(m);
  cplx val = oscillatory_line_integral(f, L, omega, tol);
  return val * std::exp(TWO_PI * static_cast<double>(m) * delta);
}

long derive_cutoff(double height, double scale, double tol, long cap) {
  long n = 1;
  while (n < cap && scale * (static_cast<double>(n) + 1.0) *
                            std::exp(-TWO_PI * height * static_cast<double>(n)) >=
                        tol)
    ++n;
  return n;
}

// Iterates c = N, 2N, ..., <= c_max with the coprime d window; calls
// fn(c, d, a0, j) with a0 the balanced inverse of d mod c.
template <typename F>
void cd_block_loop(long N, long c_max, long k_max, cplx zf, const F& fn) {
  for (long c = N; c <= c_max; c += N) {
    long dmax = k_max * c;
    for (long d = -dmax; d <= dmax; ++d) {
      long dm = ((d % c) + c) % c;
      if (std::gcd(dm, c) != 1) continue;
      long a0 = mod_inverse(dm, c);
      if (2 * a0 > c) a0 -= c;
      cplx j = static_cast<double>(c) * zf + static_cast<double>(d);
      fn(c, d, a0, j);
    }
  }
}

}  // namespace

cplx phi_s(cplx zfrak, cplx z, cplx s, double tol) {
  if (std::abs(zfrak - z) < tol)
    throw numeric_guard("PoleHit", "phi_s evaluated at a pole");
  double y = z.imag();
  cplx b = zfrak - std::conj(z);
  cplx val = pow_real_base(y, 1.0 + s) / ((zfrak - z) * b);
  return val * std::exp(-s * std::log(std::norm(b)));
}

double orbit_separation(long N, const PointPair& pair,
                        const PsiEvalParams& params) {
  cplx zf = pair.zfrak, z = pair.z;
  double best = lattice_distance(zf - z);
  cd_block_loop(N, params.c_max, params.k_max, zf,
                [&](long c, long, long a0, cplx j) {
                  cplx wM = static_cast<double>(a0) / c -
                            1.0 / (static_cast<double>(c) * j);
                  best = std::min(best, lattice_distance(wM - z));
                });
  return best;
}

cplx g_n(long n, cplx w1, cplx w2) {
  if (w2.imag() <= 0.0)
    throw invalid_input("DomainError", "g_n needs w2 in the upper half plane");
  if (w1.imag() == 0.0)
    throw invalid_input("DomainError", "g_n needs w1 off the real line");
  const cplx two_pi_i(0.0, TWO_PI);
  cplx nn(static_cast<double>(n), 0.0);
  if (n <= 0) {
    if (w1.imag() > 0.0) return 0.0;
    return two_pi_i / (w2 - w1) * std::exp(two_pi_i * nn * w1);
  }
  if (w1.imag() < 0.0) return two_pi_i / (w2 - w1) * std::exp(two_pi_i * nn * w2);
  if (std::abs(w1 - w2) < 1e-13 * (1.0 + std::abs(w1)))
    return -4.0 * PI * PI * nn * std::exp(two_pi_i * nn * w1);
  return two_pi_i / (w2 - w1) *
         (std::exp(two_pi_i * nn * w2) - std::exp(two_pi_i * nn * w1));
}

cplx zeta_term(long N, cplx s, double zfrak2, double y) {
  if (s.real() <= -0.25)
    throw invalid_input("DomainError", "zeta_term needs Re s > -1/4");
  cplx gr = gamma_ratio_half(s);
  cplx s22 = 2.0 + 2.0 * s;
  cplx val = -(TWO_PI / (1.0 + s)) * gr * gr;
  val *= pow_real_base(y, -s);
  val *= pow_real_base(zfrak2, -1.0 - 2.0 * s);
  val *= static_cast<double>(totient(N)) *
         pow_real_base(static_cast<double>(N), -s22);
  for (const auto& pe : factorize(N).primes)
    val /= 1.0 - pow_real_base(static_cast<double>(pe.first), -s22);
  val *= s_zeta_one_plus(s) / zeta(s22);
  return val;
}

cplx sum1_s0(const PointPair& pair, double tol) {
  cplx zf = pair.zfrak, z = pair.z;
  if (lattice_distance(zf - z) < 10.0 * tol)
    throw numeric_guard("PoleHit", "sum1_s0: zf - z within tolerance of Z");
  return -kI * PI * (cot_pi(zf - z) - cot_pi(zf - std::conj(z)));
}

cplx sum2_s0(long N, const PointPair& pair, const PsiEvalParams& params) {
  cplx zf = pair.zfrak, z = pair.z;
  cplx zbar = std::conj(z);
  long nc = params.c_max / N;
  if (nc <= 0) return 0.0;
  std::vector<cplx> shells(nc, 0.0);
  parallel_blocks(nc, params.threads, [&](long ci) {
    long c = (ci + 1) * N;
    long dmax = params.k_max * c;
    ComplexSum acc(params.extended);
    for (long d = -dmax; d <= dmax; ++d) {
      long dm = ((d % c) + c) % c;
      if (c > 1 && std::gcd(dm, c) != 1) continue;
      long a0 = mod_inverse(dm, c);
      if (2 * a0 > c) a0 -= c;
      cplx j = static_cast<double>(c) * zf + static_cast<double>(d);
      cplx wM = static_cast<double>(a0) / c -
                1.0 / (static_cast<double>(c) * j);
      if (lattice_distance(wM - z) < 10.0 * params.tol)
        throw numeric_guard("PoleHit", "sum2_s0: orbit point meets z");
      double u = static_cast<double>(a0) / c;
      cplx br_m = cot_pi(wM - z) - cot_pi(wM - zbar);
      cplx br_c = cot_pi(u - z) - cot_pi(u - zbar);
      acc.add(-kI * PI * (br_m - br_c) / (j * j));
    }
    shells[ci] = acc.value();
  });
  return sum_ascending(shells, params.extended);
}

cplx sum3_s0(long N, const PointPair& pair, const PsiEvalParams& params) {
  cplx zf = pair.zfrak, z = pair.z;
  double zf2 = zf.imag(), y = z.imag();
  const double scale = 8.0 * PI * PI * PI * 3.0;
  long m_max = params.m_max > 0 ? params.m_max
                                : derive_cutoff(zf2, scale, params.tol, 240);
  long n_max = params.n_max > 0 ? params.n_max
                                : derive_cutoff(y, scale, params.tol, 240);

  // Kloosterman rows for n != 0; the n = 0 line is a Ramanujan Dirichlet
  // series with a closed form.
  std::vector<KZRow> rows;
  rows.reserve(2 * m_max * n_max);
  for (long m = 1; m <= m_max; ++m)
    for (long n = -n_max; n <= n_max; ++n) {
      if (n == 0) continue;
      KZRow row;
      row.m = m;
      row.n = n;
      row.weight = [](long c) {
        return 1.0 / (static_cast<double>(c) * static_cast<double>(c));
      };
      row.tail_power = 1.5;
      rows.push_back(row);
    }
  KZOptions opt;
  opt.c_max = params.c_max;
  opt.threads = params.threads;
  opt.extended = params.extended;
  KZResult kz = kloosterman_zeta(N, rows, opt);

  cplx qzf = std::exp(cplx(0.0, TWO_PI) * zf);  // |qzf| < 1
  cplx value = zeta_term(N, cplx(0.0), zf2, y);
  std::size_t idx = 0;
  cplx qm = 1.0;
  for (long m = 1; m <= m_max; ++m) {
    qm *= qzf;
    ComplexSum inner(params.extended);
    inner.add(ramanujan_dirichlet(N, m, cplx(2.0)));  // n = 0
    for (long n = -n_max; n <= n_max; ++n) {
      if (n == 0) continue;
      cplx zrow = kz.values[idx++];
      if (n < 0) {
        // e^{-2 pi i n z} with n < 0 decays like e^{2 pi n y}.
        inner.add(zrow * std::exp(cplx(0.0, -TWO_PI * static_cast<double>(n)) * z));
      } else {
        inner.add(zrow *
                  std::exp(cplx(0.0, -TWO_PI * static_cast<double>(n)) *
                           std::conj(z)));
      }
    }
    value += -8.0 * PI * PI * PI * static_cast<double>(m) * qm * inner.value();
  }
  return value;
}

cplx y_psi2(long N, const PointPair& pair, const PsiEvalParams& params) {
  return sum1_s0(pair, params.tol) + sum2_s0(N, pair, params) +
         sum3_s0(N, pair, params);
}

DirectSum direct_poincare(long N, cplx s, const PointPair& pair,
                          const PsiEvalParams& params) {
  if (s.real() <= 0.0)
    throw invalid_input("ConvergenceRegion",
                        "direct_poincare needs Re s > 0");
  cplx zf = pair.zfrak, z = pair.z;
  double y = z.imag();
  cplx y1s = pow_real_base(y, 1.0 + s);
  auto phi = [&](cplx w) {
    cplx b = w - std::conj(z);
    return y1s / ((w - z) * b) * std::exp(-s * std::log(std::norm(b)));
  };
  if (lattice_distance(zf - z) < 10.0 * params.tol)
    throw numeric_guard("PoleHit", "direct_poincare: zf meets z");
  ComplexSum acc(params.extended);
  for (long k = -params.k_max; k <= params.k_max; ++k)
    acc.add(2.0 * phi(zf + static_cast<double>(k)));
  double shell_mag = 0.0;
  long nc = params.c_max / N;
  std::vector<cplx> shells(std::max<long>(nc, 0), 0.0);
  parallel_blocks(nc, params.threads, [&](long ci) {
    long c = (ci + 1) * N;
    long dmax = params.k_max * c;
    ComplexSum shell(params.extended);
    for (long d = -dmax; d <= dmax; ++d) {
      long dm = ((d % c) + c) % c;
      if (c > 1 && std::gcd(dm, c) != 1) continue;
      long a0 = mod_inverse(dm, c);
      if (2 * a0 > c) a0 -= c;
      cplx j = static_cast<double>(c) * zf + static_cast<double>(d);
      cplx w0 = static_cast<double>(a0) / c -
                1.0 / (static_cast<double>(c) * j);
      if (lattice_distance(w0 - z) < 10.0 * params.tol)
        throw numeric_guard("PoleHit", "direct_poincare: orbit point meets z");
      cplx jw = j * j * std::exp(s * std::log(std::norm(j)));
      ComplexSum ksum(params.extended);
      for (long k = -params.k_max; k <= params.k_max; ++k)
        ksum.add(phi(w0 + static_cast<double>(k)));
      shell.add(2.0 * ksum.value() / jw);
    }
    shells[ci] = shell.value();
  });
  for (long ci = 0; ci < nc; ++ci) acc.add(shells[ci]);
  if (nc > 0) shell_mag = std::abs(shells[nc - 1]);
  double sigma = s.real();
  DirectSum out;
  out.value = acc.value();
  out.tail = shell_mag * static_cast<double>(params.c_max) /
             (2.0 * sigma * static_cast<double>(N));
  return out;
}

DirectSum direct_poincare_converged(long N, cplx s, const PointPair& pair,
                                    const PsiEvalParams& params) {
  if (s.real() <= 0.0)
    throw invalid_input("ConvergenceRegion",
                        "direct_poincare_converged needs Re s > 0");
  cplx zf = pair.zfrak, z = pair.z;
  double y = z.imag();
  double zf2 = zf.imag();
  cplx y1s = pow_real_base(y, 1.0 + s);
  auto phi = [&](cplx w) {
    cplx b = w - std::conj(z);
    return y1s / ((w - z) * b) * std::exp(-s * std::log(std::norm(b)));
  };

  // c = 0 translates, window wide enough for the binomial tail.
  double reach = std::abs(zf - z) + std::abs(zf - std::conj(z));
  double Kz = std::max(32.0, 4.0 * std::ceil(reach) + 8.0);
  TailTable table0 = make_tail_table(s, Kz, 24);
  ComplexSum acc(params.extended);
  {
    long K = static_cast<long>(Kz);
    if (lattice_distance(zf - z) < 10.0 * params.tol)
      throw numeric_guard("PoleHit", "direct_poincare_converged: zf meets z");
    for (long k = -K; k <= K; ++k)
      acc.add(2.0 * phi(zf + static_cast<double>(k)));
    acc.add(2.0 * phi_translate_tails(table0, zf, z, y1s, params.tol * 1e-3));
  }

  // Matrix blocks with exact translate tails; the inner window is small
  // because the balanced a0 keeps the shifts within |z| + 1.
  const double Kw = std::max(24.0, 2.0 * std::ceil(std::abs(z)) + 10.0);
  TailTable table = make_tail_table(s, Kw, 24);
  const long Kwin = static_cast<long>(Kw);
  long nc = params.c_max / N;
  std::vector<cplx> shells(std::max<long>(nc, 0), 0.0);
  parallel_blocks(nc, params.threads, [&](long ci) {
    long c = (ci + 1) * N;
    long dmax = params.k_max * c;
    ComplexSum shell(params.extended);
    for (long d = -dmax; d <= dmax; ++d) {
      long dm = ((d % c) + c) % c;
      if (c > 1 && std::gcd(dm, c) != 1) continue;
      long a0 = mod_inverse(dm, c);
      if (2 * a0 > c) a0 -= c;
      cplx j = static_cast<double>(c) * zf + static_cast<double>(d);
      cplx w0 = static_cast<double>(a0) / c -
                1.0 / (static_cast<double>(c) * j);
      if (lattice_distance(w0 - z) < 10.0 * params.tol)
        throw numeric_guard("PoleHit",
                            "direct_poincare_converged: orbit point meets z");
      cplx jw = j * j * std::exp(s * std::log(std::norm(j)));
      ComplexSum ksum(params.extended);
      for (long k = -Kwin; k <= Kwin; ++k)
        ksum.add(phi(w0 + static_cast<double>(k)));
      cplx val = ksum.value() +
                 phi_translate_tails(table, w0, z, y1s,
                                     params.tol * 1e-3 * std::abs(jw));
      shell.add(2.0 * val / jw);
    }
    // Out-of-window d: each block's translate sum collapses to the line
    // integral of phi_s; the coprimality filter is opened up by Moebius.
    cplx vinf = phi_line_integral(y, s);
    ComplexSum dtail(params.extended);
    for (long e : divisors(c)) {
      int mu = moebius(e);
      if (mu == 0) continue;
      double Ke = std::floor(static_cast<double>(dmax) / e);
      cplx w = static_cast<double>(c) * zf / static_cast<double>(e);
      TailTable te = make_tail_table(s, Ke, 24);
      cplx lat = translate_tail(te, w, w, w, params.tol * 1e-6) +
                 translate_tail(te, -w, -w, -std::conj(w), params.tol * 1e-6);
      dtail.add(static_cast<double>(mu) *
                pow_real_base(static_cast<double>(e), -2.0 - 2.0 * s) * lat);
    }
    shell.add(2.0 * vinf * dtail.value());
    shells[ci] = shell.value();
  });
  for (long ci = 0; ci < nc; ++ci) acc.add(shells[ci]);

  // c > c_max: the completed d-sums aggregate to the phi(c) Dirichlet tail
  // against the Petersson w-integral density.
  cplx vinf = phi_line_integral(y, s);
  cplx full = euler_phi_dirichlet(N, 2.0 + 2.0 * s);
  RealSum partial_re(params.extended), partial_im(params.extended);
  for (long c = N; c <= params.c_max; c += N) {
    cplx p = static_cast<double>(totient(c)) *
             pow_real_base(static_cast<double>(c), -2.0 - 2.0 * s);
    partial_re.add(p.real());
    partial_im.add(p.imag());
  }
  cplx partial(partial_re.value(), partial_im.value());
  acc.add(2.0 * vinf * petersson_w_integral(zf2, s) * (full - partial));

  DirectSum out;
  out.value = acc.value();
  // Neglected oscillatory corrections: the out-of-window d blocks keep only
  // the nonoscillating part of their translate sums, leaving coherent
  // e^{-2 pi 0.9 y} terms that decay like the 3/2 power of the d window;
  // c > c_max contributes e^{-2 pi zf2}-suppressed lattice corrections.
  out.tail = 8.0 * std::exp(-TWO_PI * 0.9 * y) *
                 std::pow(static_cast<double>(params.k_max), -1.5) +
             4.0 * std::exp(-TWO_PI * std::min(y, zf2)) *
                 std::pow(static_cast<double>(params.c_max), -2.0 * s.real());
  return out;
}

cplx sum1_s(const PointPair& pair, double s, const PsiEvalParams& params) {
  cplx zf = pair.zfrak, z = pair.z;
  double y = z.imag();
  cplx sc(s, 0.0);
  cplx y1s = pow_real_base(y, 1.0 + sc);
  double reach = std::abs(zf - z) + std::abs(zf - std::conj(z));
  double Kz = std::max(32.0, 4.0 * std::ceil(reach) + 8.0);
  TailTable table = make_tail_table(sc, Kz, 24);
  if (lattice_distance(zf - z) < 10.0 * params.tol)
    throw numeric_guard("PoleHit", "sum1_s: zf meets z");
  ComplexSum acc(params.extended);
  long K = static_cast<long>(Kz);
  for (long k = -K; k <= K; ++k)
    acc.add(2.0 * phi_s(zf + static_cast<double>(k), z, sc, params.tol));
  acc.add(2.0 * phi_translate_tails(table, zf, z, y1s, params.tol * 1e-3));
  return acc.value();
}

cplx sum2_s(long N, const PointPair& pair, double s,
            const PsiEvalParams& params) {
  cplx zf = pair.zfrak, z = pair.z;
  double y = z.imag();
  cplx sc(s, 0.0);
  cplx y1s = pow_real_base(y, 1.0 + sc);
  auto phi = [&](cplx w) {
    cplx b = w - std::conj(z);
    return y1s / ((w - z) * b) * std::exp(-sc * std::log(std::norm(b)));
  };
  const double Kw = std::max(24.0, 2.0 * std::ceil(std::abs(z)) + 10.0);
  TailTable table = make_tail_table(sc, Kw, 24);
  const long Kwin = static_cast<long>(Kw);
  long nc = params.c_max / N;
  if (nc <= 0) return 0.0;
  std::vector<cplx> shells(nc, 0.0);
  parallel_blocks(nc, params.threads, [&](long ci) {
    long c = (ci + 1) * N;
    long dmax = params.k_max * c;
    ComplexSum shell(params.extended);
    for (long d = -dmax; d <= dmax; ++d) {
      long dm = ((d % c) + c) % c;
      if (c > 1 && std::gcd(dm, c) != 1) continue;
      long a0 = mod_inverse(dm, c);
      if (2 * a0 > c) a0 -= c;
      cplx j = static_cast<double>(c) * zf + static_cast<double>(d);
      cplx w0 = static_cast<double>(a0) / c -
                1.0 / (static_cast<double>(c) * j);
      if (lattice_distance(w0 - z) < 10.0 * params.tol)
        throw numeric_guard("PoleHit", "sum2_s: orbit point meets z");
      double u = static_cast<double>(a0) / c;
      cplx jw = j * j * std::exp(sc * std::log(std::norm(j)));
      ComplexSum ksum(params.extended);
      for (long k = -Kwin; k <= Kwin; ++k) {
        double kk = static_cast<double>(k);
        ksum.add(phi(w0 + kk) - phi(cplx(u + kk, 0.0)));
      }
      cplx val = ksum.value();
      // The paired translate tails nearly cancel; complete them only when
      // their individual scale can matter for the block.
      double tail_scale =
          2.0 * y * std::pow(Kw, -1.0 - 2.0 * s) / (static_cast<double>(c) *
                                                    std::abs(j));
      if (tail_scale > params.tol * 1e-2 * std::abs(jw)) {
        val += phi_translate_tails(table, w0, z, y1s,
                                   params.tol * 1e-3 * std::abs(jw)) -
               phi_translate_tails(table, cplx(u, 0.0), z, y1s,
                                   params.tol * 1e-3 * std::abs(jw));
      }
      shell.add(2.0 * val / jw);
    }
    shells[ci] = shell.value();
  });
  return sum_ascending(shells, params.extended);
}

cplx sum3_s(long N, const PointPair& pair, double s,
            const PsiEvalParams& params) {
  cplx zf = pair.zfrak, z = pair.z;
  double zf2 = zf.imag(), y = z.imag();
  cplx sc(s, 0.0);
  const double scale = 8.0 * PI * PI * PI * 3.0;
  long m_max = params.m_max > 0
                   ? params.m_max
                   : derive_cutoff(0.9 * zf2, scale, params.tol * 10.0, 12);
  long n_max = params.n_max > 0
                   ? params.n_max
                   : derive_cutoff(0.9 * y, scale, params.tol * 10.0, 12);
  double qtol = params.tol * 1e-2;

  std::vector<cplx> wints(2 * m_max + 1), tints(2 * n_max + 1);
  for (long m = -m_max; m <= m_max; ++m)
    wints[m + m_max] = w_integral(m, zf, sc, qtol);
  for (long n = -n_max; n <= n_max; ++n)
    tints[n + n_max] = t_integral(n, z, sc, qtol);

  std::vector<KZRow> rows;
  for (long m = -m_max; m <= m_max; ++m)
    for (long n = -n_max; n <= n_max; ++n) {
      if (m == 0 || n == 0) continue;
      KZRow row;
      row.m = m;
      row.n = n;
      double expo = 2.0 + 2.0 * s;
      row.weight = [expo](long c) {
        return std::pow(static_cast<double>(c), -expo);
      };
      row.tail_power = expo - 0.5;
      rows.push_back(row);
    }
  KZOptions opt;
  opt.c_max = params.c_max;
  opt.threads = params.threads;
  opt.extended = params.extended;
  KZResult kz = kloosterman_zeta(N, rows, opt);

  ComplexSum acc(params.extended);
  std::size_t idx = 0;
  for (long m = -m_max; m <= m_max; ++m)
    for (long n = -n_max; n <= n_max; ++n) {
      if (m == 0 && n == 0) continue;
      cplx zmn;
      if (m == 0)
        zmn = ramanujan_dirichlet(N, n, 2.0 + 2.0 * sc);
      else if (n == 0)
        zmn = ramanujan_dirichlet(N, m, 2.0 + 2.0 * sc);
      else
        zmn = kz.values[idx++];
      acc.add(2.0 * wints[m + m_max] * tints[n + n_max] * zmn);
    }
  return acc.value() + zeta_term(N, sc, zf2, y);
}

cplx psi2k_direct(long N, int k, const PointPair& pair,
                  const PsiEvalParams& params) {
  if (k < 2)
    throw invalid_input("DomainError", "psi2k_direct needs weight 2k >= 4");
  cplx zf = pair.zfrak, z = pair.z;
  cplx zb = std::conj(z);
  const int p = 2 * k - 1;
  if (lattice_distance(zf - z) < 10.0 * params.tol)
    throw numeric_guard("PoleHit", "psi2k_direct: zf meets z");

  // Full translate sum with exact binomial tails; the negative side folds
  // onto the helper because (-1)^{1+p} = 1 for odd p.
  auto translate_sum = [&](cplx w0, long K) {
    ComplexSum s(params.extended);
    for (long kk = -K; kk <= K; ++kk) {
      cplx w = w0 + static_cast<double>(kk);
      s.add(1.0 / ((w - z) * int_pow(w - zb, p)));
    }
    cplx A = w0 - z, B = w0 - zb;
    double Kd = static_cast<double>(K);
    return s.value() + product_inverse_tail(A, B, p, Kd) +
           product_inverse_tail(-A, -B, p, Kd);
  };

  double reach = std::abs(zf - z) + 2.0;
  long K0 = std::max<long>(32, static_cast<long>(4.0 * reach) + 8);
  ComplexSum acc(params.extended);
  acc.add(2.0 * translate_sum(zf, K0));

  long Kwin = std::max<long>(24, static_cast<long>(4.0 * std::abs(z)) + 10);
  // Fourier modes of the line integral of the kernel.  n <= 0 closes the
  // contour upward around the simple pole at z; n > 0 closes downward around
  // the order-p pole at zb, whose derivatives bring a (2 pi n)^{p-1} factor
  // that beats e^{-2 pi n y} for the first few n, so these modes are not
  // negligible against the n = 0 one.
  std::vector<double> fact(p, 1.0);
  for (int i = 1; i < p; ++i) fact[i] = fact[i - 1] * i;
  auto kernel_mode = [&](long n) -> cplx {
    cplx w(0.0, -TWO_PI * n);
    if (n <= 0)
      return cplx(0.0, TWO_PI) * int_pow(1.0 / (z - zb), p) * std::exp(w * z);
    cplx dz = 1.0 / (zb - z);
    cplx s = 0.0;
    for (int jj = 0; jj < p; ++jj) {
      cplx term =
          int_pow(dz, jj + 1) * int_pow(w, p - 1 - jj) / fact[p - 1 - jj];
      s += (jj % 2) ? -term : term;
    }
    return cplx(0.0, -TWO_PI) * std::exp(w * zb) * s;
  };
  cplx v2k = kernel_mode(0);
  double vscale = std::abs(v2k);
  std::vector<cplx> modes_pos, modes_neg;
  for (long n = 1; n <= 16; ++n) {
    modes_pos.push_back(kernel_mode(n));
    modes_neg.push_back(kernel_mode(-n));
    if (std::abs(modes_pos.back()) < vscale * 1e-10 &&
        std::abs(modes_neg.back()) < vscale * 1e-10)
      break;
  }
  long n_cut = static_cast<long>(modes_pos.size());
  long nc = params.c_max / N;
  std::vector<cplx> shells(std::max<long>(nc, 0), 0.0);
  parallel_blocks(nc, params.threads, [&](long ci) {
    long c = (ci + 1) * N;
    long dmax = params.k_max * c;
    ComplexSum shell(params.extended);
    for (long d = -dmax; d <= dmax; ++d) {
      long dm = ((d % c) + c) % c;
      if (c > 1 && std::gcd(dm, c) != 1) continue;
      long a0 = mod_inverse(dm, c);
      if (2 * a0 > c) a0 -= c;
      cplx j = static_cast<double>(c) * zf + static_cast<double>(d);
      cplx w0 = static_cast<double>(a0) / c -
                1.0 / (static_cast<double>(c) * j);
      if (lattice_distance(w0 - z) < 10.0 * params.tol)
        throw numeric_guard("PoleHit", "psi2k_direct: orbit point meets z");
      shell.add(2.0 * translate_sum(w0, Kwin) * int_pow(1.0 / j, 2 * k));
    }
    // |d| > dmax: Poisson over the k translates turns each block into
    // sum_n g(n) e^{2 pi i n M0 zfrak} / j^{2k} with M0 zfrak = a0/c - 1/(cj).
    // Expanding e^{-2 pi i n/(cj)} in powers of 1/j reduces the d sum over
    // each coprime residue class r to one-sided lattice tails in q = (d-r)/c.
    ComplexSum dtail(params.extended);
    double cd = static_cast<double>(c);
    for (long r = 0; r < c; ++r) {
      if (std::gcd(r, c) != 1) continue;
      cplx wr = zf + static_cast<double>(r) / cd;
      double a0r = static_cast<double>(mod_inverse(r, c));
      double Qp = std::floor(static_cast<double>(dmax - r) / cd);
      double Qm = std::floor(static_cast<double>(dmax + r) / cd);
      for (long n = -n_cut; n <= n_cut; ++n) {
        cplx g = n == 0 ? v2k : (n > 0 ? modes_pos[n - 1] : modes_neg[-n - 1]);
        if (std::abs(g) < vscale * 1e-12) continue;
        cplx phase = std::exp(cplx(0.0, TWO_PI * n * a0r / cd));
        cplx step = cplx(0.0, -TWO_PI * n) / (cd * cd);
        cplx coef = 1.0;
        ComplexSum modesum(false);
        for (int t = 0; t <= 40; ++t) {
          double sgn = (t % 2) ? -1.0 : 1.0;
          cplx term = coef * (inverse_power_tail(2 * k + t, wr, Qp) +
                              sgn * inverse_power_tail(2 * k + t, -wr, Qm));
          modesum.add(term);
          if (n == 0) break;
          if (t >= 2 && std::abs(term) < 1e-18 * (1.0 + std::abs(g)))
            break;
          coef *= step / static_cast<double>(t + 1);
        }
        dtail.add(g * phase * modesum.value());
      }
    }
    shell.add(2.0 * std::pow(cd, -2.0 * k) * dtail.value());
    shells[ci] = shell.value();
  });
  for (long ci = 0; ci < nc; ++ci) acc.add(shells[ci]);
  // c > c_max rows: the complete d lattice would resum to e^{-2 pi c zf2},
  // but coprimality leaves Moebius pieces at heights c zf2 / e down to zf2,
  // so each omitted row is of order c^{-2k} e^{-2 pi zf2} and the truncation
  // error decays like c_max^{1-2k}.
  return acc.value();
}

}  // namespace pmaass
