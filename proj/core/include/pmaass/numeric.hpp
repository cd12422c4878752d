#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace pmaass {

using cplx = std::complex<double>;

inline constexpr double PI = 3.141592653589793238462643383279503;
inline constexpr double TWO_PI = 2.0 * PI;
inline constexpr double EULER_GAMMA = 0.577215664901532860606512090082402;

inline cplx unit_exp(double t) { return {std::cos(t), std::sin(t)}; }

// e(a/c) on exact rationals, reduced mod c first so large numerators lose
// no precision to the multiplication by 2*pi.
inline cplx root_of_unity(long long num, long long den) {
  long long r = num % den;
  if (r < 0) r += (den < 0 ? -den : den);
  return unit_exp(TWO_PI * static_cast<double>(r) / static_cast<double>(den));
}

// ---------------------------------------------------------------------------
// Compensated accumulation.
//
// Every long sum in the library funnels through RealSum/ComplexSum so that
// results are reproducible and truncation error dominates rounding error.
// The extended flag switches Neumaier compensation to double-double, which
// keeps ~32 significant digits in the running value.

struct TwoSum {
  double s, e;
};

inline TwoSum two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

class RealSum {
 public:
  explicit RealSum(bool extended = false) : extended_(extended) {}

  void add(double x) {
    if (extended_) {
      // Grow a two-term expansion hi+lo by x (error-free at each step).
      TwoSum t = two_sum(hi_, x);
      lo_ += t.e;
      TwoSum r = two_sum(t.s, lo_);
      hi_ = r.s;
      lo_ = r.e;
    } else {
      TwoSum t = two_sum(sum_, x);
      sum_ = t.s;
      comp_ += t.e;
    }
  }

  double value() const { return extended_ ? hi_ + lo_ : sum_ + comp_; }

 private:
  bool extended_;
  double sum_ = 0.0, comp_ = 0.0;
  double hi_ = 0.0, lo_ = 0.0;
};

class ComplexSum {
 public:
  explicit ComplexSum(bool extended = false) : re_(extended), im_(extended) {}
  void add(cplx z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  RealSum re_, im_;
};

// ---------------------------------------------------------------------------
// Deterministic parallelism.
//
// Work is cut into fixed blocks up front; each block writes its partial
// result into its own slot and slots are reduced in ascending index order.
// The float result is therefore independent of the thread count.

void parallel_blocks(long nblocks, int threads,
                     const std::function<void(long)>& body);

inline cplx sum_ascending(const std::vector<cplx>& parts,
                          bool extended = false) {
  ComplexSum acc(extended);
  for (const cplx& p : parts) acc.add(p);
  return acc.value();
}

// ---------------------------------------------------------------------------
// Quadrature: adaptive Simpson for smooth (possibly oscillatory) complex
// integrands on a finite interval.  Absolute tolerance.

cplx integrate_adaptive(const std::function<cplx(double)>& f, double a,
                        double b, double tol, int max_depth = 30);

// ---------------------------------------------------------------------------
// Zeta machinery.

// Riemann zeta by Euler-Maclaurin, valid away from s = 1 for Re(s) > -6.
cplx zeta(cplx s);
double zeta(double s);

// s * zeta(1 + 2s): analytic through s = 0 (value 1/2 there), computed from
// the Stieltjes expansion near the pole and directly elsewhere.
cplx s_zeta_one_plus(cplx s);

// Tail of the Hurwitz-type sum: sum_{k > K} k^{-q} for real q > 1, via
// Euler-Maclaurin off the integral.  Used by the analytic tail completions.
double power_tail(double q, double K);

// Same with complex exponent q (Re q > 1).
cplx power_tail(cplx q, double K);

}  // namespace pmaass
