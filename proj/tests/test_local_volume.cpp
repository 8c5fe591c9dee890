#include <cmath>

#include <gtest/gtest.h>

#include "effabc/local_volume.hpp"

using namespace effabc;

namespace {

// direct transcription of the definitions with rationals throughout
mpq_class q(long a, long b = 1) {
  mpq_class r(a, b);
  r.canonicalize();
  return r;
}

mpq_class naive_a(std::uint64_t p, std::uint64_t e) {
  mpz_class c;
  mpz_class n = e + 1, d = p - 1;
  mpz_cdiv_q(c.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return mpq_class(c) / static_cast<unsigned long>(e);
}

mpq_class naive_b(std::uint64_t p, std::uint64_t e) {
  mpq_class best = q(-1, static_cast<long>(e));  // n = 0
  mpz_class pn = 1;
  for (long n = 1; n < 80; ++n) {
    pn *= static_cast<unsigned long>(p);
    mpq_class v = mpq_class(n) - mpq_class(pn) / static_cast<unsigned long>(e);
    v.canonicalize();
    if (v > best) best = v;
  }
  return best;
}

mpq_class naive_d(std::uint64_t p, std::uint64_t e) {
  if (e % p != 0) return 1 - q(1, static_cast<long>(e));
  long v = 0;
  for (std::uint64_t m = e; m % p == 0; m /= p) ++v;
  return mpq_class(1 + v);
}

mpq_class naive_B0(std::uint64_t p, std::uint64_t e, std::uint64_t u, std::uint64_t j, std::uint64_t l) {
  mpq_class a = naive_a(p, e), b = naive_b(p, e), d = naive_d(p, e);
  mpq_class J(static_cast<long>(j));
  mpq_class shift = J * J * static_cast<unsigned long>(u) / static_cast<unsigned long>(2 * l);
  mpq_class inner = -shift + J * d + (J + 1) * a;
  inner.canonicalize();
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), inner.get_num_mpz_t(), inner.get_den_mpz_t());
  mpq_class first = mpq_class(c) + shift;
  mpq_class second = (p == 2 ? 2 : 1) * (J + 1);
  mpq_class r = (first > second ? first : second) + (J + 1) * b;
  r.canonicalize();
  return r;
}

mpq_class naive_B2(std::uint64_t p, std::uint64_t l, bool prime_variant) {
  const std::uint64_t e0 = 3, ls = (l - 1) / 2;
  std::vector<std::pair<std::uint64_t, int>> choices;
  bool special = p == 2 || p == 3 || p == l;
  if (!special) {
    choices.push_back({1, 0});
    for (std::uint64_t e : {std::uint64_t{1}, std::uint64_t{3}, l, 3 * l}) choices.push_back({e, 1});
  } else {
    std::vector<std::uint64_t> good, multi;
    if (p == 2) {
      good = prime_variant ? std::vector<std::uint64_t>{2} : std::vector<std::uint64_t>{2, 4, 6, 8, 12, 16, 24, 48};
      multi = {2, 6, 2 * l, 6 * l};
    } else if (p == 3) {
      good = {2, 6, 8};
      multi = {2, 6, 2 * l, 6 * l};
    } else {
      good = {l - 1, l * (l - 1), l * l - 1};
      multi = {l - 1, 3 * (l - 1), l * (l - 1), 3 * l * (l - 1)};
    }
    for (auto e : good) choices.push_back({e, 0});
    for (auto e : multi) choices.push_back({e, 1});
  }
  bool first = true;
  mpq_class best;
  for (auto [e, delta] : choices) {
    for (std::uint64_t u = 0; u < 2 * l; ++u) {
      if (delta == 0 && u != 0) continue;
      if (delta == 1 && (e * u) % (2 * l) != 0) continue;
      mpq_class sum = 0;
      for (std::uint64_t j = 1; j <= ls; ++j) sum += naive_B0(p, e, u, j, l);
      mpq_class b1 = sum / static_cast<unsigned long>(ls) * q(4, static_cast<long>(l + 5));
      if (delta == 1) b1 -= 1 - q(1, static_cast<long>(e0 * (e % l == 0 ? l : 1)));
      b1.canonicalize();
      if (first || b1 > best) best = b1;
      first = false;
    }
  }
  return best;
}

}  // namespace

TEST(LocalIndices, MatchDefinitions) {
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 101}) {
    for (std::uint64_t e = 1; e <= 400; ++e) {
      ASSERT_EQ(a_p(p, e), naive_a(p, e)) << p << " " << e;
      ASSERT_EQ(b_p(p, e), naive_b(p, e)) << p << " " << e;
      ASSERT_EQ(d_p(p, e), naive_d(p, e)) << p << " " << e;
    }
  }
  EXPECT_THROW(a_p(4, 1), std::domain_error);
}

TEST(LocalIndices, GenericPrimeValues) {
  // p >= e + 2: a = 1/e, b = -1/e, d = 1 - 1/e
  for (std::uint64_t e : {1, 3, 11, 33}) {
    EXPECT_EQ(a_p(101, e), q(1, static_cast<long>(e)));
    EXPECT_EQ(b_p(101, e), q(-1, static_cast<long>(e)));
  }
}

TEST(AdmissibleU, DivisibilityRule) {
  for (std::uint64_t l : {11, 13, 17}) {
    for (std::uint64_t e : {1ul, 2ul, 3ul, l, 2 * l, 6 * l, l - 1, l * (l - 1)}) {
      std::vector<std::uint64_t> want;
      for (std::uint64_t u = 0; u < 2 * l; ++u)
        if ((e * u) % (2 * l) == 0) want.push_back(u);
      EXPECT_EQ(admissible_u(e, 1, l), want) << l << " " << e;
    }
    EXPECT_EQ(admissible_u(5, 0, l), std::vector<std::uint64_t>{0});
  }
}

TEST(B2, BruteForceAtElevenAndThirteen) {
  for (std::uint64_t l : {11, 13}) {
    for (bool variant : {false, true}) {
      RamificationDataset d = variant ? make_Rl_prime(l) : make_Rl(l);
      for (std::uint64_t p : vol_primes(d)) {
        ASSERT_EQ(B2(d, p), naive_B2(p, l, variant)) << d.id << " p=" << p;
        ASSERT_GE(B2_relaxed(d, p), B2(d, p)) << d.id << " p=" << p;
      }
    }
  }
}

TEST(B2, GenericPrimesVanish) {
  RamificationDataset d = make_Rl(11);
  // above 3l + 1 every ramification index is generic
  for (std::uint64_t p : {37, 41, 43, 101, 1009}) EXPECT_EQ(B2(d, p), 0) << p;
}

TEST(B0, RejectsInadmissibleArguments) {
  EXPECT_THROW(B0(5, 3, 0, 1, 1, 11), std::domain_error);
  EXPECT_THROW(B0(5, 3, 1, 1, 1, 11), std::domain_error);
  EXPECT_THROW(B0(5, 3, 1, 0, 6, 11), std::domain_error);
  EXPECT_EQ(B0(5, 1, 0, 0, 1, 11), naive_B0(5, 1, 0, 1, 11));
}

TEST(Vol, ExactAgainstLongDoubleOracle) {
  for (std::uint64_t l : {11, 13, 17, 29, 97}) {
    RamificationDataset d = make_Rl(l);
    long double sum = std::log(static_cast<long double>(M_PI));
    for (std::uint64_t p : vol_primes(d)) sum += B2(d, p).get_d() * std::log(static_cast<long double>(p));
    long double L = l;
    long double v = std::max<long double>(0, (L * L + 5 * L) / (L * L + L - 12) * sum);
    VolResult r = vol(d, VolMethod::exact);
    EXPECT_LE(r.value.lo(), static_cast<double>(v) * (1 + 1e-12));
    EXPECT_GE(r.value.hi(), static_cast<double>(v) * (1 - 1e-12));
    EXPECT_TRUE(certainly_gt(r.value, log(pi_enclosure()))) << l;
  }
}

TEST(Vol, MethodsDominateExactUpTo200) {
  PrimeTables t = PrimeTables::build(1 << 16);
  for (std::uint64_t l = 11; l <= 200; ++l) {
    if (!is_prime_u64(l)) continue;
    for (bool variant : {false, true}) {
      RamificationDataset d = variant ? make_Rl_prime(l) : make_Rl(l);
      Enclosure ex = vol(d, VolMethod::exact).value;
      for (VolMethod m : {VolMethod::per_j_relaxed, VolMethod::closed_form, VolMethod::f2_bound}) {
        Enclosure v = vol(d, m, &t).value;
        ASSERT_FALSE(certainly_lt(v, ex)) << d.id << " " << to_string(m);
        ASSERT_GE(v.lo(), ex.lo() - 1e-9 * ex.hi()) << d.id << " " << to_string(m);
      }
    }
  }
}

TEST(Vol, ClosedFormNeedsTables) {
  EXPECT_ANY_THROW(vol(make_Rl(11), VolMethod::closed_form, nullptr));
}

TEST(Dataset, JsonRoundTripAndValidation) {
  RamificationDataset d = make_Rl_prime(17);
  nlohmann::json j = d;
  RamificationDataset e = j.get<RamificationDataset>();
  EXPECT_EQ(e.id, d.id);
  EXPECT_EQ(e.good(2), d.good(2));
  EXPECT_EQ(e.multi(17), d.multi(17));
  j["l0"] = 9;
  EXPECT_THROW(j.get<RamificationDataset>(), std::domain_error);
  EXPECT_THROW(make_Rl(7), std::domain_error);
}
