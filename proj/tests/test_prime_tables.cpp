#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <mpfr.h>

#include "effabc/prime_tables.hpp"

using namespace effabc;

namespace {

bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// sum over trial-division primes <= x of f(p), accumulated in MPFR at 200 bits
struct OracleSums {
  std::uint64_t pi = 0;
  unsigned __int128 sum_p = 0;
  mpfr_t theta, plogp, lpm1;
  explicit OracleSums(std::uint64_t x) {
    mpfr_inits2(200, theta, plogp, lpm1, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_ui(theta, 0, MPFR_RNDN);
    mpfr_set_ui(plogp, 0, MPFR_RNDN);
    mpfr_set_ui(lpm1, 0, MPFR_RNDN);
    mpfr_t l, t;
    mpfr_inits2(200, l, t, static_cast<mpfr_ptr>(nullptr));
    for (std::uint64_t p = 2; p <= x; ++p) {
      if (!trial_prime(p)) continue;
      ++pi;
      sum_p += p;
      mpfr_set_ui(l, p, MPFR_RNDN);
      mpfr_log(l, l, MPFR_RNDN);
      mpfr_add(theta, theta, l, MPFR_RNDN);
      mpfr_mul_ui(t, l, p, MPFR_RNDN);
      mpfr_add(plogp, plogp, t, MPFR_RNDN);
      mpfr_div_ui(t, l, p - 1, MPFR_RNDN);
      mpfr_add(lpm1, lpm1, t, MPFR_RNDN);
    }
    mpfr_clears(l, t, static_cast<mpfr_ptr>(nullptr));
  }
  ~OracleSums() { mpfr_clears(theta, plogp, lpm1, static_cast<mpfr_ptr>(nullptr)); }
};

bool inside(mpfr_t v, const Enclosure& e) { return mpfr_cmp_d(v, e.lo()) >= 0 && mpfr_cmp_d(v, e.hi()) <= 0; }

}  // namespace

TEST(PrimeTables, KnownCounts) {
  PrimeTables t = PrimeTables::build(10'000'000);
  EXPECT_EQ(t.prime_pi(10), 4u);
  EXPECT_EQ(t.prime_pi(1e6), 78498u);
  EXPECT_EQ(t.prime_pi(1e7), 664579u);
  EXPECT_EQ(t.prime_pi(2), 1u);
  EXPECT_EQ(t.prime_pi(1), 0u);
  EXPECT_EQ(t.sum_primes(100), 1060u);
  EXPECT_THROW(t.prime_pi(2e7), std::out_of_range);
}

TEST(PrimeTables, SumsMatchTrialDivisionOracle) {
  // a small stride puts many checkpoints below the oracle range
  PrimeTables t = PrimeTables::build(300'000, 4096);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> pick(2, 300'000);
  std::vector<std::uint64_t> xs = {2, 3, 4095, 4096, 4097, 65536, 300'000};
  for (int i = 0; i < 12; ++i) xs.push_back(pick(rng));
  for (std::uint64_t x : xs) {
    OracleSums o(x);
    PrimeSums s = t.sums_at(x);
    ASSERT_EQ(s.pi, o.pi) << x;
    ASSERT_TRUE(s.sum_p == o.sum_p) << x;
    ASSERT_TRUE(inside(o.theta, t.theta(static_cast<double>(x)))) << x;
    ASSERT_TRUE(inside(o.plogp, t.sum_plogp(static_cast<double>(x)))) << x;
    ASSERT_TRUE(inside(o.lpm1, t.sum_logp_over_pm1(static_cast<double>(x)))) << x;
  }
}

TEST(PrimeTables, PlogpAtAMillionInsideEnclosure) {
  // standard-precision enclosure against a 200-bit accumulation
  PrimeTables t = PrimeTables::build(1'000'000);
  OracleSums o(1'000'000);
  Enclosure e = t.sum_plogp(1e6);
  EXPECT_TRUE(inside(o.plogp, e));
  EXPECT_LT(e.width(), 1e-9 * e.hi());
}

TEST(PrimeTables, NonIntegerArgumentsFloor) {
  PrimeTables t = PrimeTables::build(1000);
  EXPECT_EQ(t.prime_pi(100.9), 25u);
  EXPECT_EQ(t.theta(100.9).lo(), t.theta(100).lo());
}

TEST(PrimeTables, ParallelMatchesSerial) {
  PrimeTables a = PrimeTables::build(3'000'000, 1 << 14);
  PrimeTables b = PrimeTables::build_serial(3'000'000, 1 << 14);
  ASSERT_EQ(a.checkpoints().size(), b.checkpoints().size());
  for (std::size_t i = 0; i < a.checkpoints().size(); ++i) ASSERT_TRUE(a.checkpoints()[i] == b.checkpoints()[i]) << i;
}

TEST(PrimeTables, IterationAndRanges) {
  PrimeTables t = PrimeTables::build(200'000, 1 << 12);
  auto ps = t.primes_in(100, 200);
  std::vector<std::uint64_t> want;
  for (std::uint64_t p = 101; p <= 200; ++p)
    if (trial_prime(p)) want.push_back(p);
  EXPECT_EQ(ps, want);
  std::uint64_t count = 0, last = 0;
  bool ascending = true;
  t.for_each_prime(4000, 150'000, [&](std::uint64_t p) {
    ascending = ascending && p > last;
    last = p;
    ++count;
  });
  EXPECT_TRUE(ascending);
  EXPECT_EQ(count, t.prime_pi(150'000) - t.prime_pi(4000));
  auto sp = small_primes_upto(100);
  EXPECT_EQ(sp.size(), 25u);
  EXPECT_EQ(sp.back(), 97u);
}

TEST(PrimeTables, SaveLoadRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / "effabc_tables_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  PrimeTables t = PrimeTables::build(1'000'000);
  t.save(dir / "t.bin");
  PrimeTables u = PrimeTables::load(dir / "t.bin", 1.0);
  EXPECT_EQ(u.limit(), t.limit());
  EXPECT_EQ(u.prime_pi(999'999), t.prime_pi(999'999));
  EXPECT_EQ(u.theta(777'777).hi(), t.theta(777'777).hi());

  PrimeTables c = PrimeTables::cached(dir, 500'000);
  EXPECT_GE(c.limit(), 500'000u);
  EXPECT_EQ(c.prime_pi(500'000), 41538u);
  std::filesystem::remove_all(dir);
}

TEST(PrimeTables, CorruptFileRejected) {
  auto path = std::filesystem::temp_directory_path() / "effabc_corrupt.bin";
  PrimeTables::build(1'000'000).save(path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-40, std::ios::end);
    char junk[8] = {1, 2, 3, 4, 5, 6, 7, 8};
    f.write(junk, 8);
  }
  EXPECT_ANY_THROW(PrimeTables::load(path, 1.0));
  std::filesystem::remove(path);
}

TEST(SmallPrimeLogs, Counts) {
  const auto& sp = SmallPrimeLogs::get();
  EXPECT_EQ(sp.primes[0], 2u);
  // (p - 1)^2 < 17 for p = 2, 3, 5
  EXPECT_EQ(sp.count_below_sqrt_plus_one(17), 3u);
  // p (p - 1) < 21 for p = 2, 3, 5 but not 7
  EXPECT_EQ(sp.count_pp1_below(21), 3u);
  Enclosure s = sp.sum_log_pm1(3);  // log 1 + log 2 + log 4
  EXPECT_TRUE(s.contains(3 * std::log(2.0)));
}
