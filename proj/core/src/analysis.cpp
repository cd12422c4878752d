#include "pmaass/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "pmaass/basis.hpp"
#include "pmaass/errors.hpp"
#include "pmaass/special_functions.hpp"

namespace pmaass {

namespace {

cplx ipow(cplx base, long e) {
  if (e < 0) return 1.0 / ipow(base, -e);
  cplx r(1.0);
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// Inverse of xmap: the z with X_zh(z) = X.
cplx z_of_x(cplx zh, cplx X) {
  return (zh - std::conj(zh) * X) / (1.0 - X);
}

double default_h(cplx z, double h) {
  if (h > 0.0) return h;
  return 1e-3 * std::min(1.0, z.imag());
}

bool finite(cplx v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace

cplx xmap(cplx zh, cplx z) {
  cplx den = z - std::conj(zh);
  if (den == cplx(0.0))
    throw invalid_input("DomainError",
                        "X_zh is undefined at the conjugate point");
  return (z - zh) / den;
}

EllipticExpansion elliptic_coeffs(const PointFn& F, cplx zh, long k,
                                  long n_min, long n_max, double r, int angles,
                                  int threads, double sep_tol, long omega) {
  if (!(zh.imag() > 0.0))
    throw invalid_input("DomainError", "expansion center must have Im > 0");
  if (!(r > 0.0 && r < 1.0))
    throw invalid_input("DomainError", "radius must lie in (0, 1)");
  if (n_min > n_max) throw invalid_input("DomainError", "empty index range");
  if (n_min < 0 && k < 1)
    throw invalid_input("DomainError",
                        "the beta branch is only defined for k >= 1");

  long M = std::max<long>(angles, 2 * (n_max - n_min + 2));
  const double radii[2] = {r, 0.5 * r};

  // Angular samples of F(z) (z - conj(zh))^{2-2k} on the two circles.
  std::vector<std::vector<cplx>> G(2, std::vector<cplx>(M));
  for (int ri = 0; ri < 2; ++ri) {
    parallel_blocks(M, threads, [&, ri](long j) {
      cplx X = radii[ri] * unit_exp(TWO_PI * static_cast<double>(j) /
                                    static_cast<double>(M));
      cplx z = z_of_x(zh, X);
      G[ri][j] = F(z) * ipow(z - std::conj(zh), 2 - 2 * k);
    });
  }

  EllipticExpansion out;
  out.center = zh;
  out.k = k;
  out.omega = omega;
  out.r_used = r;

  for (long n = n_min; n <= n_max; ++n) {
    // Angular Fourier coefficient at frequency n on each circle, divided by
    // the radial power so it reads a_n + b_n * beta factor.
    cplx u[2];
    for (int ri = 0; ri < 2; ++ri) {
      ComplexSum acc;
      for (long j = 0; j < M; ++j)
        acc.add(G[ri][j] * unit_exp(-TWO_PI * static_cast<double>((j * n) % M) /
                                    static_cast<double>(M)));
      u[ri] = acc.value() / static_cast<double>(M) /
              std::pow(radii[ri], static_cast<double>(n));
    }

    if (n <= -1) {
      double a_beta = static_cast<double>(-n);
      double b_beta = static_cast<double>(2 * k - 1);
      double phi1 = incomplete_beta(radii[0] * radii[0], a_beta, b_beta);
      double phi2 = incomplete_beta(radii[1] * radii[1], a_beta, b_beta);
      double det = phi2 - phi1;
      double frob2 = 2.0 + phi1 * phi1 + phi2 * phi2;
      if (std::abs(det) * 1e6 < frob2)
        throw numeric_guard("IllConditioned",
                            "the two-radius system cannot separate the beta "
                            "branch at this index");
      cplx bn = (u[1] - u[0]) / det;
      out.a[n] = u[0] - bn * phi1;
      out.b[n] = bn;
    } else {
      // On the certified subspace the radial factor is absent at n >= 0, so
      // both circles must report the same coefficient.
      double scale = 1.0 + std::max(std::abs(u[0]), std::abs(u[1]));
      if (std::abs(u[0] - u[1]) > sep_tol * scale)
        throw numeric_guard("NotInCuspSubspace",
                            "radial dependence detected in a nonnegative "
                            "index coefficient");
      out.a[n] = u[0];
    }
  }
  return out;
}

std::vector<cplx> cusp_form_elliptic_coeffs(const std::vector<double>& q_coeffs,
                                            cplx zh, long k, long n_max) {
  if (!(zh.imag() > 0.0))
    throw invalid_input("DomainError", "expansion center must have Im > 0");
  if (k < 1)
    throw invalid_input("DomainError", "holomorphic weight 2k needs k >= 1");
  if (n_max < 0) throw invalid_input("DomainError", "empty index range");

  TermSum ts;
  ts.base = zh;
  for (long m = 0; m < static_cast<long>(q_coeffs.size()); ++m)
    if (q_coeffs[m] != 0.0)
      ts.terms.push_back({cplx(q_coeffs[m]), static_cast<int>(2 * k), m});

  std::vector<cplx> out;
  out.reserve(n_max + 1);
  double fct = 1.0;
  for (long n = 0; n <= n_max; ++n) {
    if (n > 0) {
      ts = d_operator(ts, zh, 1);
      fct *= static_cast<double>(n);
    }
    out.push_back(term_sum_eval(ts, zh) / fct);
  }
  return out;
}

namespace {

// One central-difference estimate of dF/dconj(z); mag collects the sample
// magnitude for the step guard's roundoff floor.
cplx dzbar_once(const PointFn& F, cplx z, double h, double* mag) {
  cplx fpx = F(z + h), fmx = F(z - h);
  cplx fpy = F(z + cplx(0.0, h)), fmy = F(z - cplx(0.0, h));
  *mag = std::max(*mag, std::max(std::max(std::abs(fpx), std::abs(fmx)),
                                 std::max(std::abs(fpy), std::abs(fmy))));
  cplx fx = (fpx - fmx) / (2.0 * h);
  cplx fy = (fpy - fmy) / (2.0 * h);
  return 0.5 * (fx + cplx(0.0, 1.0) * fy);
}

cplx lap_once(const PointFn& F, double kappa, cplx z, cplx f0, double h,
              double* mag) {
  cplx fpx = F(z + h), fmx = F(z - h);
  cplx fpy = F(z + cplx(0.0, h)), fmy = F(z - cplx(0.0, h));
  *mag = std::max(*mag, std::max(std::max(std::abs(fpx), std::abs(fmx)),
                                 std::max(std::abs(fpy), std::abs(fmy))));
  cplx fxx = (fpx - 2.0 * f0 + fmx) / (h * h);
  cplx fyy = (fpy - 2.0 * f0 + fmy) / (h * h);
  cplx fx = (fpx - fmx) / (2.0 * h);
  cplx fy = (fpy - fmy) / (2.0 * h);
  double y = z.imag();
  return -y * y * (fxx + fyy) +
         cplx(0.0, kappa * y) * (fx + cplx(0.0, 1.0) * fy);
}

}  // namespace

cplx xi_numeric(const PointFn& F, double kappa, cplx z, double h) {
  if (!(z.imag() > 0.0))
    throw invalid_input("DomainError", "xi is evaluated on the upper half-plane");
  double h1 = default_h(z, h);
  double mag = 0.0;
  cplx d1 = dzbar_once(F, z, h1, &mag);
  cplx d2 = dzbar_once(F, z, 0.5 * h1, &mag);
  // Smooth inputs put the halved step within O(h^2) of the full one; a gap
  // of half the value itself (beyond the noise floor mag/h) means the
  // stencil straddles structure it cannot resolve.
  if (std::abs(d1 - d2) > 0.5 * std::abs(d2) + 1e-3 * mag / h1)
    throw numeric_guard("StepTooLarge",
                        "derivative estimates disagree between step sizes");
  cplx d = (4.0 * d2 - d1) / 3.0;
  return 2.0 * cplx(0.0, 1.0) * std::pow(z.imag(), kappa) * std::conj(d);
}

cplx laplacian_numeric(const PointFn& F, double kappa, cplx z, double h) {
  if (!(z.imag() > 0.0))
    throw invalid_input("DomainError",
                        "the Laplacian is evaluated on the upper half-plane");
  double h1 = default_h(z, h);
  cplx f0 = F(z);
  double mag = std::abs(f0);
  cplx v1 = lap_once(F, kappa, z, f0, h1, &mag);
  cplx v2 = lap_once(F, kappa, z, f0, 0.5 * h1, &mag);
  if (std::abs(v1 - v2) > 0.5 * std::abs(v2) + 1e-3 * mag / (h1 * h1))
    throw numeric_guard("StepTooLarge",
                        "Laplacian estimates disagree between step sizes");
  return (4.0 * v2 - v1) / 3.0;
}

cplx residue_in_zhbar(const PointFn& F, cplx z0, double radius, int threads) {
  if (!(radius > 0.0))
    throw invalid_input("DomainError", "contour radius must be positive");
  const long m_start = 512, m_cap = 8192;

  // vals[j] = F(z0 + w_j) w_j at w_j = radius e^{2 pi i j / M}; doubling
  // interleaves new odd-index samples between the old ones.
  std::vector<cplx> vals(m_start);
  auto sample = [&](long j, long m_tot) {
    cplx w = radius * unit_exp(TWO_PI * static_cast<double>(j) /
                               static_cast<double>(m_tot));
    return F(z0 + w) * w;
  };
  parallel_blocks(m_start, threads,
                  [&](long j) { vals[j] = sample(j, m_start); });

  auto total = [&]() {
    ComplexSum acc;
    for (const cplx& v : vals) {
      if (!finite(v))
        throw numeric_guard("ContourHitsPole",
                            "non-finite sample on the contour");
      acc.add(v);
    }
    return acc.value() / static_cast<double>(vals.size());
  };

  cplx prev = total();
  long m = m_start;
  while (m < m_cap) {
    std::vector<cplx> next(2 * m);
    for (long j = 0; j < m; ++j) next[2 * j] = vals[j];
    parallel_blocks(m, threads,
                    [&](long j) { next[2 * j + 1] = sample(2 * j + 1, 2 * m); });
    vals.swap(next);
    m *= 2;
    cplx cur = total();
    if (std::abs(cur - prev) < 1e-8) return cur;
    prev = cur;
  }
  throw numeric_guard("ContourHitsPole",
                      "contour sums failed to settle; a singularity sits on "
                      "or too close to the circle");
}

}  // namespace pmaass
