#include "pmaass/numeric.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "pmaass/errors.hpp"

namespace pmaass {

void parallel_blocks(long nblocks, int threads,
                     const std::function<void(long)>& body) {
  if (nblocks <= 0) return;
  if (threads <= 1 || nblocks == 1) {
    for (long i = 0; i < nblocks; ++i) body(i);
    return;
  }
  int nt = threads;
  if (static_cast<long>(nt) > nblocks) nt = static_cast<int>(nblocks);
  std::atomic<long> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        long i = next.fetch_add(1);
        if (i >= nblocks) break;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (!first_error) first_error = std::current_exception();
          // Keep draining indices so other threads see the end quickly.
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

cplx simpson(double a, double b, cplx fa, cplx fm, cplx fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

cplx adaptive_step(const std::function<cplx(double)>& f, double a, double m,
                   double b, cplx fa, cplx fm, cplx fb, cplx whole, double tol,
                   int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  cplx flm = f(lm), frm = f(rm);
  cplx left = simpson(a, m, fa, flm, fm);
  cplx right = simpson(m, b, fm, frm, fb);
  cplx delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

cplx integrate_adaptive(const std::function<cplx(double)>& f, double a,
                        double b, double tol, int max_depth) {
  if (!(b > a)) {
    if (a == b) return 0.0;
    throw invalid_input("DomainError", "integration interval is reversed");
  }
  // Seed with a few panels so an integrand that oscillates on a scale the
  // first Simpson stencil misses still gets refined.
  const int panels = 8;
  double h = (b - a) / panels;
  cplx total = 0.0;
  for (int i = 0; i < panels; ++i) {
    double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
    cplx f0 = f(x0), fm = f(xm), f1 = f(x1);
    cplx whole = simpson(x0, x1, f0, fm, f1);
    total += adaptive_step(f, x0, xm, x1, f0, fm, f1, whole, tol / panels,
                           max_depth);
  }
  return total;
}

namespace {

// B_2, B_4, ..., B_14
constexpr double kBernoulli[] = {1.0 / 6.0,   -1.0 / 30.0,    1.0 / 42.0,
                                 -1.0 / 30.0, 5.0 / 66.0,     -691.0 / 2730.0,
                                 7.0 / 6.0};

// Euler-Maclaurin with M initial terms; good to ~1e-15 for |s| up to ~20
// in the strip we use (the library never needs zeta far from the real axis).
cplx zeta_em(cplx s) {
  const int M = 24;
  ComplexSum head;
  for (int n = 1; n < M; ++n)
    head.add(std::exp(-s * std::log(static_cast<double>(n))));
  cplx Ms = std::exp(-s * std::log(static_cast<double>(M)));
  cplx val = head.value() + static_cast<double>(M) * Ms / (s - 1.0) + 0.5 * Ms;
  // Correction sum: B_{2j}/(2j)! * s(s+1)...(s+2j-2) * M^{-s-2j+1}
  cplx rising = s;           // s (s+1) ... accumulated
  double fact = 2.0;         // (2j)!
  cplx mpow = Ms / static_cast<double>(M);  // M^{-s-1}
  for (int j = 1; j <= 7; ++j) {
    val += kBernoulli[j - 1] / fact * rising * mpow;
    // advance to next j: multiply rising by (s+2j-1)(s+2j), fact by
    // (2j+1)(2j+2), mpow by M^{-2}
    rising *= (s + static_cast<double>(2 * j - 1)) *
              (s + static_cast<double>(2 * j));
    fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    mpow /= static_cast<double>(M) * static_cast<double>(M);
  }
  return val;
}

}  // namespace

cplx zeta(cplx s) {
  if (std::abs(s - 1.0) < 1e-12)
    throw invalid_input("DomainError", "zeta pole at s = 1");
  if (s.real() < -6.0)
    throw invalid_input("DomainError",
                        "zeta implemented for Re(s) > -6 only");
  return zeta_em(s);
}

double zeta(double s) { return zeta(cplx(s, 0.0)).real(); }

cplx s_zeta_one_plus(cplx s) {
  if (std::abs(s) < 0.02) {
    // zeta(1+e) = 1/e + sum_k (-1)^k gamma_k e^k / k!  with e = 2s.
    static constexpr double g1 = -0.0728158454836767248605863758749013;
    static constexpr double g2 = -0.0096903631928723184845303860352125;
    static constexpr double g3 = 0.0020538344203033458661600465427534;
    static constexpr double g4 = 0.0023253700654673000574681701775260;
    cplx e = 2.0 * s;
    cplx series = EULER_GAMMA - g1 * e + 0.5 * g2 * e * e -
                  g3 / 6.0 * e * e * e + g4 / 24.0 * e * e * e * e;
    return 0.5 + s * series;
  }
  return s * zeta(1.0 + 2.0 * s);
}

double power_tail(double q, double K) {
  return power_tail(cplx(q, 0.0), K).real();
}

cplx power_tail(cplx q, double K) {
  if (q.real() <= 1.0)
    throw invalid_input("DomainError", "power_tail needs Re(q) > 1");
  // sum_{k > K} k^{-q} = K^{1-q}/(q-1) - K^{-q}/2 + EM corrections built
  // from derivatives of t^{-q} at t = K (f(K)/2 enters with minus because
  // the k = K term itself is excluded).
  cplx Kq = std::exp(-q * std::log(K));
  cplx val = K * Kq / (q - 1.0) - 0.5 * Kq;
  cplx deriv = -q * Kq / K;                                 // f'(K)
  val -= kBernoulli[0] / 2.0 * deriv;                       // -B2/2! f'(K)
  cplx d3 = -q * (q + 1.0) * (q + 2.0) * Kq / (K * K * K);  // f'''(K)
  val -= kBernoulli[1] / 24.0 * d3;                         // -B4/4! f'''(K)
  return val;
}

}  // namespace pmaass
