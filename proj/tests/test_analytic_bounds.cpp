#include <random>

#include <gtest/gtest.h>
#include <mpfr.h>

#include "effabc/analytic_bounds.hpp"

using namespace effabc;

namespace {

const PrimeTables& tables() {
  static const PrimeTables t = PrimeTables::build(30'000'000);
  return t;
}

// f1 from its defining sums, primes by trial division, MPFR at 200 bits
double oracle_f1(std::uint64_t x) {
  auto is_prime = [](std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  };
  mpfr_t acc, l, t, theta, plogp;
  mpfr_inits2(200, acc, l, t, theta, plogp, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_ui(acc, 0, MPFR_RNDN);
  mpfr_set_ui(theta, 0, MPFR_RNDN);
  mpfr_set_ui(plogp, 0, MPFR_RNDN);
  for (std::uint64_t p = 2; p <= x; ++p) {
    if (!is_prime(p)) continue;
    mpfr_set_ui(l, p, MPFR_RNDN);
    mpfr_log(l, l, MPFR_RNDN);
    mpfr_div_ui(t, l, p - 1, MPFR_RNDN);
    mpfr_add(acc, acc, t, MPFR_RNDN);
    mpfr_add(theta, theta, l, MPFR_RNDN);
    mpfr_mul_ui(t, l, p, MPFR_RNDN);
    mpfr_add(plogp, plogp, t, MPFR_RNDN);
    // p < sqrt(x) + 1
    if ((p - 1) * (p - 1) < x) {
      mpfr_set_ui(t, x, MPFR_RNDN);
      mpfr_div_ui(t, t, p - 1, MPFR_RNDN);
      mpfr_log(t, t, MPFR_RNDN);
      mpfr_add(acc, acc, t, MPFR_RNDN);
    }
  }
  mpfr_add(acc, acc, theta, MPFR_RNDN);
  mpfr_sub(t, theta, plogp, MPFR_RNDN);
  mpfr_div_ui(t, t, x, MPFR_RNDN);
  mpfr_add(acc, acc, t, MPFR_RNDN);
  double out = mpfr_get_d(acc, MPFR_RNDN);
  mpfr_clears(acc, l, t, theta, plogp, static_cast<mpfr_ptr>(nullptr));
  return out;
}

}  // namespace

TEST(F1, MatchesDefiningSums) {
  for (std::uint64_t x : {4ul, 10ul, 97ul, 1000ul, 4096ul, 20011ul, 65537ul}) {
    Enclosure v = f1(static_cast<double>(x), tables());
    double o = oracle_f1(x);
    EXPECT_LE(v.lo(), o * (1 + 1e-14) + 1e-14) << x;
    EXPECT_GE(v.hi(), o * (1 - 1e-14) - 1e-14) << x;
    EXPECT_LT(v.width(), 1e-9 * std::max(1.0, o)) << x;
  }
}

TEST(F1, IncrementalAgreesWithDirect) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> start(4, 29'000'000);
  for (int trial = 0; trial < 6; ++trial) {
    std::uint64_t n0 = trial == 0 ? 4 : start(rng);
    F1Incremental inc(tables(), n0);
    for (int step = 0; step < 200'000; ++step) {
      if (step % 997 == 0) {
        Enclosure a = inc.value(), b = f1(static_cast<double>(inc.n()), tables());
        ASSERT_TRUE(a.overlaps(b)) << inc.n();
        ASSERT_LT(std::abs(a.mid() - b.mid()), 1e-9 * std::max(1.0, b.mid())) << inc.n();
      }
      inc.advance();
    }
  }
}

TEST(F1, SweepOnAModestRange) {
  SweepCertificate c = sweep_f1(200'000, 3'000'000, tables(), 1 << 18);
  EXPECT_TRUE(c.passed);
  EXPECT_EQ(c.kind, "f1_sweep");
  EXPECT_EQ(c.worst_at, 200'705);
  EXPECT_NEAR(c.worst_margin.mid(), 2.3332, 1e-3);
  EXPECT_THROW(sweep_f1(10, 40'000'000, tables()), std::out_of_range);
}

TEST(F1, SerialChunkingDoesNotChangeTheResult) {
  SweepCertificate a = sweep_f1(500'000, 1'500'000, tables(), 1 << 16);
  SweepCertificate b = sweep_f1(500'000, 1'500'000, tables(), 1 << 22);
  EXPECT_EQ(a.worst_at, b.worst_at);
  EXPECT_EQ(a.passed, b.passed);
}

TEST(F1, TheInequalityFailsBelowTheRange) {
  // near the small end the fringe 0.01865 n / log n is too small
  EXPECT_GE(f1(100, tables()).lo(), f1_target(100).hi());
}

TEST(F2, DominatesItsPieces) {
  Enclosure v = f2(1000, tables());
  EXPECT_GT(v.lo(), f1(3000, tables()).hi());
  EXPECT_LT(v.hi(), f2_target(1000).hi() * 2);
  EXPECT_THROW(f2(2e7, tables()), std::out_of_range);
}

TEST(F3F4, HoldAtTheBottomOfTheRange) {
  Enclosure x = exp(Enclosure(31.0));
  ASSERT_LE(f3_f4_required_limit(x), tables().limit());
  F3F4Result r = f3_f4_values(x, tables());
  EXPECT_EQ(r.f3, Verdict::holds);
  EXPECT_EQ(r.f4, Verdict::holds);
  SweepCertificate c = f3_f4_check(x, tables());
  EXPECT_TRUE(c.passed);
  EXPECT_THROW(f3_f4_check(Enclosure(1e10), tables()), std::domain_error);
}
