#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "pmaass/arith.hpp"
#include "pmaass/errors.hpp"
#include "pmaass/kloosterman.hpp"

using namespace pmaass;

namespace {

// O(c^2) definitional oracle.
cplx oracle_classical(long m, long n, long c) {
  cplx s = 0.0;
  for (long a = 0; a < c; ++a)
    for (long d = 0; d < c; ++d) {
      if (((a * d) % c + c) % c != 1 % c) continue;
      s += root_of_unity(n * a + m * d, c);
    }
  if (c == 1) s = 1.0;  // the empty-product pair a = d = 0
  return s;
}

// Definitional oracle for the cusp sum, with no unit-table shortcuts.
cplx oracle_cusp(long N, const Cusp& cusp, long m, long n, long c) {
  long ell = cusp.width, lc = ell * c;
  cplx s = 0.0;
  for (long a = 0; a < lc; ++a) {
    if (std::gcd(a % c, c) != 1 && c > 1) continue;
    if ((c + a % N * cusp.kalpha % N * cusp.kgamma) % N != 0) continue;
    long d = (c == 1) ? 0 : mod_inverse(a % c, c);
    s += root_of_unity(m * ell * d + n * a, lc);
  }
  return s;
}

}  // namespace

TEST_CASE("classical sums match the definitional oracle") {
  for (long c = 1; c <= 60; ++c)
    for (long m = -3; m <= 3; ++m)
      for (long n = -3; n <= 3; ++n) {
        cplx expect = oracle_classical(m, n, c);
        CHECK(std::abs(expect.imag()) < 1e-9);
        CHECK(kloosterman(m, n, c) ==
              doctest::Approx(expect.real()).epsilon(1e-10).scale(1.0));
      }
  CHECK(kloosterman(0, 0, 6) == doctest::Approx(2.0));
  CHECK(kloosterman(1, 1, 2) == doctest::Approx(1.0));
  CHECK(kloosterman(1, 1, 3) == doctest::Approx(-1.0));
}

TEST_CASE("classical sum symmetries and the Weil-type bound") {
  for (long c = 1; c <= 40; ++c)
    for (long m = -4; m <= 4; ++m)
      for (long n = -4; n <= 4; ++n) {
        double k = kloosterman(m, n, c);
        CHECK(k == doctest::Approx(kloosterman(n, m, c)).epsilon(1e-12));
        CHECK(k == doctest::Approx(kloosterman(-m, -n, c)).epsilon(1e-12));
        if (m != 0 || n != 0) {
          long g = std::gcd(std::gcd(std::abs(m), std::abs(n)), c);
          long tau = static_cast<long>(divisors(c).size());
          CHECK(std::abs(k) <=
                tau * std::sqrt(static_cast<double>(g) * c) + 1e-9);
        }
      }
}

TEST_CASE("Ramanujan sums") {
  for (long c = 1; c <= 80; ++c)
    for (long m = -6; m <= 6; ++m)
      CHECK(static_cast<double>(ramanujan_sum(m, c)) ==
            doctest::Approx(kloosterman(m, 0, c)).epsilon(1e-10).scale(1.0));
  CHECK(ramanujan_sum(0, 12) == totient(12));
  CHECK(ramanujan_sum(1, 12) == moebius(12));
}

TEST_CASE("cusp sums: definitional enumeration vs production") {
  for (long N : {1L, 2L, 4L, 6L, 8L, 9L, 11L, 12L}) {
    GroupData G = group_data(N);
    for (const Cusp& cusp : G.cusps)
      for (long c = 1; c <= 30; ++c)
        for (long m = -2; m <= 2; ++m)
          for (long n = -2; n <= 2; ++n) {
            cplx expect = oracle_cusp(N, cusp, m, n, c);
            cplx got = cusp_kloosterman(N, cusp, m, n, c);
            CHECK(std::abs(got - expect) < 1e-9);
          }
  }
}

TEST_CASE("width-splitting rewrite reproduces the cusp sums") {
  for (long N : {1L, 2L, 3L, 4L, 6L, 8L, 9L, 11L, 12L}) {
    GroupData G = group_data(N);
    for (const Cusp& cusp : G.cusps)
      for (long c = 1; c <= 48; ++c)
        for (long m = -2; m <= 2; ++m)
          for (long n = -2; n <= 2; ++n) {
            cplx direct = cusp_kloosterman(N, cusp, m, n, c);
            cplx rewritten = cusp_kloosterman_via_classical(N, cusp, m, n, c);
            CHECK(std::abs(direct - rewritten) < 1e-10);
          }
  }
}

TEST_CASE("infinity cusp collapses to the restricted classical sum") {
  for (long N : {1L, 4L, 11L}) {
    GroupData G = group_data(N);
    const Cusp& inf = G.cusp_infinity();
    for (long c = 1; c <= 3 * N + 5; ++c)
      for (long m = -2; m <= 2; ++m)
        for (long n = -2; n <= 2; ++n) {
          cplx v = cusp_kloosterman(N, inf, m, n, c);
          double expect = (c % N == 0) ? kloosterman(m, n, c) : 0.0;
          CHECK(std::abs(v - cplx(expect)) < 1e-9);
        }
  }
}

TEST_CASE("restricted Ramanujan Dirichlet series against sieve partials") {
  const std::vector<long> ms = {1, 2, 6, -4};
  const std::vector<double> ss = {2.0, 2.5, 3.0};
  for (long N : {1L, 5L, 6L}) {
    const long C = 120000;
    std::vector<std::vector<RealSum>> part(ms.size(),
                                           std::vector<RealSum>(ss.size()));
    for (long c = N; c <= C; c += N)
      for (size_t i = 0; i < ms.size(); ++i) {
        long cc = ramanujan_sum(ms[i], c);
        for (size_t j = 0; j < ss.size(); ++j)
          part[i][j].add(cc * std::pow(c, -ss[j]));
      }
    for (size_t i = 0; i < ms.size(); ++i)
      for (size_t j = 0; j < ss.size(); ++j) {
        double tail = 4.0 * sigma1(std::abs(ms[i])) /
                      (N * (ss[j] - 1.0) * std::pow(C, ss[j] - 1.0));
        cplx closed = ramanujan_dirichlet(N, ms[i], ss[j]);
        CHECK(std::abs(closed.imag()) < 1e-12);
        CHECK(std::abs(closed.real() - part[i][j].value()) < tail + 1e-11);
      }
  }
  CHECK_THROWS_AS(ramanujan_dirichlet(1, 0, 2.5), invalid_input);
}

TEST_CASE("phi Dirichlet series against sieve partials") {
  for (long N : {1L, 4L, 6L, 11L, 12L}) {
    for (double sr : {3.0, 4.0}) {
      const long C = 40000;
      RealSum part;
      for (long c = N; c <= C; c += N)
        part.add(totient(c) * std::pow(c, -sr));
      double tail = 2.0 / ((sr - 2.0) * N * std::pow(C, sr - 2.0));
      cplx closed = euler_phi_dirichlet(N, sr);
      CHECK(std::abs(closed.real() - part.value()) < tail);
      CHECK(std::abs(closed.imag()) < 1e-12);
    }
  }
}

TEST_CASE("batched zeta sums agree with naive accumulation") {
  std::vector<KZRow> rows;
  rows.push_back({1, 1, [](long c) { return std::pow(c, -2.0); }, 2.0});
  rows.push_back({2, -3, [](long c) { return std::pow(c, -2.5); }, 2.5});
  rows.push_back({0, 5, [](long c) { return 1.0 / (c * c); }, 2.0});
  KZOptions opt;
  opt.c_max = 600;
  KZResult got = kloosterman_zeta(6, rows, opt);
  for (size_t r = 0; r < rows.size(); ++r) {
    ComplexSum naive;
    for (long c = 6; c <= opt.c_max; c += 6)
      naive.add(rows[r].weight(c) * kloosterman(rows[r].m, rows[r].n, c));
    CHECK(std::abs(got.values[r] - naive.value()) < 1e-12);
    CHECK(got.tails[r] > 0.0);
    CHECK(got.tails[r] < 1.0);
  }
}

TEST_CASE("batched sums are thread-count independent") {
  std::vector<KZRow> rows;
  rows.push_back({1, 2, [](long c) { return std::pow(c, -2.0); }, 0.0});
  rows.push_back({-1, 3, [](long c) { return std::pow(c, -1.8); }, 0.0});
  KZOptions one, four;
  one.c_max = four.c_max = 2000;
  one.threads = 1;
  four.threads = 4;
  KZResult a = kloosterman_zeta(11, rows, one);
  KZResult b = kloosterman_zeta(11, rows, four);
  for (size_t r = 0; r < rows.size(); ++r) {
    CHECK(a.values[r].real() == b.values[r].real());
    CHECK(a.values[r].imag() == b.values[r].imag());
  }
}

TEST_CASE("cusp-attached batched sums") {
  GroupData G = group_data(4);
  const Cusp* half = G.find_cusp("1/2");
  REQUIRE(half != nullptr);
  std::vector<KZRow> rows;
  rows.push_back({1, -1, [](long c) { return std::pow(c, -2.0); }, 0.0});
  KZOptions opt;
  opt.c_max = 120;
  KZResult got = cusp_kloosterman_zeta(4, *half, rows, opt);
  ComplexSum naive;
  for (long c = 1; c <= opt.c_max; ++c)
    naive.add(std::pow(c, -2.0) * cusp_kloosterman(4, *half, 1, -1, c));
  CHECK(std::abs(got.values[0] - naive.value()) < 1e-12);

  // Infinity fast path equals the restricted classical machinery.
  KZResult inf_fast = cusp_kloosterman_zeta(4, G.cusp_infinity(), rows, opt);
  ComplexSum inf_naive;
  for (long c = 4; c <= opt.c_max; c += 4)
    inf_naive.add(std::pow(c, -2.0) * kloosterman(1, -1, c));
  CHECK(std::abs(inf_fast.values[0] - inf_naive.value()) < 1e-12);
}
