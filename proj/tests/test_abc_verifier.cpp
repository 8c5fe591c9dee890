#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "effabc/abc_verifier.hpp"

using namespace effabc;

namespace {

struct Oracle {
  bool identity, inequality;
};

// N_A, N_B and the N_l as integers; the inequality compared after exponentiating both sides
Oracle lemma_oracle(const std::map<std::uint64_t, std::uint64_t>& f, const std::vector<std::uint64_t>& S, int k) {
  mpz_class lhs_id = 1, NA = 1, NB = 1, prodNp = 1;
  for (auto p : S) {
    auto it = f.find(p);
    if (it != f.end()) {
      mpz_class t;
      mpz_ui_pow_ui(t.get_mpz_t(), p, it->second);
      lhs_id *= t;
      NA *= t;
    }
  }
  for (auto [q, e] : f) {
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), q, e);
    bool inB = false;
    for (auto l : S) inB = inB || e % l == 0;
    if (inB) NB *= t;
    for (auto l : S)
      if (e % l == 0) prodNp *= t;
  }
  mpz_class rhs;
  mpz_pow_ui(rhs.get_mpz_t(), NB.get_mpz_t(), static_cast<unsigned long>(k - 1));
  return {lhs_id == NA, prodNp <= rhs};
}

const PrimeTables& tables() {
  static const PrimeTables t = PrimeTables::build(1 << 20);
  return t;
}

}  // namespace

TEST(Factoring, TrialDivisionAndLogs) {
  mpz_class n = mpz_class(2 * 2 * 2) * 3 * 1000003 * 1000003;
  FactoredInteger f = FactoredInteger::factor(n);
  EXPECT_EQ(f.v(2), 3u);
  EXPECT_EQ(f.v(1000003), 2u);
  EXPECT_EQ(f.v(5), 0u);
  EXPECT_EQ(f.value(), n);
  EXPECT_TRUE(f.rad_log().contains(std::log(2.0 * 3 * 1000003)));
  EXPECT_TRUE(f.h().contains(std::log(n.get_d())));
  FactoredInteger g = f.part_divisible_by(2);
  EXPECT_EQ(g.value(), mpz_class(1000003) * 1000003);
  // a prime cofactor above the bound is accepted, a composite one is refused
  EXPECT_EQ(FactoredInteger::factor(mpz_class("1000000000000000003")).v(1000000000000000003ull), 1u);
  EXPECT_THROW(FactoredInteger::factor(mpz_class(1000003) * 1000033, 1000), std::domain_error);
}

TEST(LogCombination, ExactSign) {
  // 2^10 vs 10^3: 10 log 2 - 3 log 10 > 0
  EXPECT_EQ(log_combination_sign({{2, 10 - 3}, {5, -3}}), 1);
  EXPECT_EQ(log_combination_sign({{2, 6}, {4, -3}}), 0);
  EXPECT_EQ(log_combination_sign({{3, -1}}), -1);
  EXPECT_EQ(log_combination_sign({}), 0);
}

TEST(PrimePowerSplit, OracleEquivalenceOnRandomIntegers) {
  std::mt19937_64 rng(2024);
  const std::vector<std::uint64_t> pool = {5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43};
  const std::vector<std::uint64_t> bases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67};
  int checked = 0, nontrivial = 0;
  while (checked < 10000) {
    std::vector<std::uint64_t> S;
    std::size_t n = 2 + rng() % 3;
    while (S.size() < n) {
      auto p = pool[rng() % pool.size()];
      if (std::find(S.begin(), S.end(), p) == S.end()) S.push_back(p);
    }
    std::sort(S.begin(), S.end());
    int k = 2 + static_cast<int>(rng() % (n - 1));
    double budget = static_cast<double>(k_of(S, k).get_d()) - 1;  // log2 N must stay below k(S)
    std::map<std::uint64_t, std::uint64_t> f;
    double used = 0;
    for (int tries = 0; tries < 12; ++tries) {
      auto q = bases[rng() % bases.size()];
      std::uint64_t e = rng() % 2 ? S[rng() % S.size()] * (1 + rng() % 3) : 1 + rng() % 20;
      double add = static_cast<double>(e) * std::log2(static_cast<double>(q));
      if (f.count(q) || used + add > budget) continue;
      f[q] = e;
      used += add;
    }
    if (f.empty()) continue;
    FactoredInteger N(f);
    Oracle o = lemma_oracle(f, S, k);
    Lemma31Report r = lemma31_part_i(N, S, k);
    ASSERT_EQ(r.identity_holds, o.identity);
    ASSERT_EQ(r.inequality_holds, o.inequality);
    ASSERT_TRUE(r.holds());  // the lemma itself
    nontrivial += f.size() > 1;
    ++checked;
  }
  EXPECT_GT(nontrivial, 5000);
}

TEST(PrimePowerSplit, HypothesisDecidedExactlyAtTheEdge) {
  std::vector<std::uint64_t> S = {5, 7};  // k(S) = 35
  mpz_class two35 = mpz_class(1) << 35;
  EXPECT_THROW(lemma31_part_i(FactoredInteger::factor(two35), S, 2), std::domain_error);
  EXPECT_TRUE(lemma31_part_i_check(FactoredInteger::factor(two35 - 1), S, 2));
  EXPECT_THROW(lemma31_part_i(FactoredInteger::factor(mpz_class(6)), {5}, 2), std::domain_error);
  EXPECT_THROW(lemma31_part_i(FactoredInteger::factor(mpz_class(6)), S, 3), std::domain_error);
}

TEST(VolTable, WindowSumsMatchDirectSummation) {
  VolTable vt = VolTable::build(3000, DatasetKind::R, tables());
  EXPECT_EQ(vt.primes().front(), 11u);
  EXPECT_EQ(vt.policy(), "exact<=200,closed_form");
  EXPECT_TRUE(vt.vol(199).overlaps(vol(make_Rl(199), VolMethod::exact).value));
  EXPECT_TRUE(vt.vol(211).overlaps(vol(make_Rl(211), VolMethod::closed_form, &tables()).value));
  for (auto [lo, hi] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{10, 100}, {100, 2999}, {12, 17}, {500, 900}}) {
    PrimeWindow w = make_window(vt, lo, hi, lo < 13);
    CombinerParams a = window_params(vt, w, 2);
    CombinerParams b = direct_params(window_primes(vt, w), 2, [&](std::uint64_t l) { return vt.vol(l); });
    EXPECT_EQ(a.k_S, b.k_S);
    EXPECT_TRUE(a.a1.overlaps(b.a1)) << lo;
    EXPECT_TRUE(a.a2.overlaps(b.a2)) << lo;
    EXPECT_TRUE(a.a3.overlaps(b.a3)) << lo;
    EXPECT_LT(a.a2.width(), 1e-9 * a.a2.hi());
  }
  PrimeWindow no13 = make_window(vt, 10, 20, false);
  EXPECT_EQ(no13.n, 3u);  // 11, 17, 19
  EXPECT_THROW(VolTable::build(1'000'000, DatasetKind::R, tables()), std::out_of_range);
}

TEST(Margins, TightBoundBelowLoose) {
  VolTable vt = VolTable::build(2000, DatasetKind::R, tables());
  PrimeWindow w = make_window(vt, 36, 300, false);
  CombinerParams p = window_params(vt, w, 2);
  for (double h : {700.0, 1000.0, 5000.0}) {
    Enclosure H(h);
    EXPECT_LT(abc_margin(p, H).hi(), abc_loose_margin(p, H).hi() + 1e-9) << h;
  }
}

TEST(Sweep, CoversAndRechecks) {
  const double h_hi = 20000;
  VolTable vt = VolTable::build(sweep_l_max(h_hi), DatasetKind::R, tables());
  auto path = std::filesystem::temp_directory_path() / "effabc_sweep_test.jsonl";
  std::filesystem::remove(path);
  SweepOptions opt;
  opt.h_hi = 3000;
  opt.out = path;
  auto first = sweep_abc(opt, vt);
  ASSERT_FALSE(first.empty());
  opt.h_hi = h_hi;
  opt.resume = true;
  sweep_abc(opt, vt);
  auto all = read_certificates(path);
  EXPECT_GT(all.size(), first.size());
  EXPECT_TRUE(check_coverage(all, 680, h_hi).ok);
  for (const auto& c : all) {
    RecheckResult r = recheck(c, vt);
    ASSERT_TRUE(r.ok) << r.reason;
    EXPECT_LT(c.margin_lo.hi(), 0);
    EXPECT_LT(c.margin_hi.hi(), 0);
  }
  // a gap or a tampered value is caught
  auto gap = all;
  gap.erase(gap.begin() + 1);
  EXPECT_FALSE(check_coverage(gap, 680, h_hi).ok);
  auto bad = all.front();
  bad.a2 = bad.a2 * 0.5;
  EXPECT_FALSE(recheck(bad, vt).ok);
  bad = all.front();
  bad.S.window_hi += 100;
  EXPECT_FALSE(recheck(bad, vt).ok);
  std::filesystem::remove(path);
}

TEST(HeightConstants, Constants) {
  HeightConstantValues v = height_constant_values();
  EXPECT_GT(v.f10.lo(), 0);
  EXPECT_NEAR(v.f10.mid(), 0.04, 0.005);
  EXPECT_LT(v.f10.width(), 1e-6);
  EXPECT_GT(v.min_derivative.lo(), 0);
  EXPECT_TRUE(v.identity_exact);
  EXPECT_TRUE(height_constant_check().passed);
}
