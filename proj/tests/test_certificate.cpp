#include <limits>

#include <gtest/gtest.h>

#include "effabc/certificate.hpp"
#include "effabc/power_search.hpp"

using namespace effabc;

TEST(SweepCertificateJson, RoundTrip) {
  SweepCertificate c;
  c.kind = "f1_sweep";
  c.range_lo = 2e5;
  c.range_hi = 2.89e8;
  c.grid = "every integer";
  c.worst_margin = Enclosure(-0.25, -0.125);
  c.worst_at = 200705;
  c.tables_limit = 289'000'000;
  c.duration_ms = 12.5;
  c.passed = true;
  c.details = {{"note", "x"}};
  nlohmann::json j = c;
  EXPECT_EQ(j["schema"], kSchemaVersion);
  SweepCertificate d = nlohmann::json::parse(j.dump()).get<SweepCertificate>();
  EXPECT_EQ(d.kind, c.kind);
  EXPECT_EQ(d.range_hi, c.range_hi);
  EXPECT_EQ(d.worst_margin.lo(), -0.25);
  EXPECT_EQ(d.worst_margin.hi(), -0.125);
  EXPECT_EQ(d.tables_limit, c.tables_limit);
  EXPECT_EQ(d.details, c.details);
}

TEST(SweepCertificateJson, InfiniteRange) {
  SweepCertificate c;
  c.kind = "flt_contradiction";
  c.range_lo = 11;
  c.range_hi = std::numeric_limits<double>::infinity();
  nlohmann::json j = c;
  EXPECT_EQ(j["range"][1], "inf");
  SweepCertificate d = nlohmann::json::parse(j.dump()).get<SweepCertificate>();
  EXPECT_TRUE(std::isinf(d.range_hi));
  j["range"][1] = "huge";
  EXPECT_THROW(j.get<SweepCertificate>(), std::invalid_argument);
}

TEST(ExclusionCertificateJson, BothKinds) {
  ExclusionCertificate a;
  a.S = {10, 300, {}, 58};
  a.k = 2;
  a.dataset = "R";
  a.vol_policy = "exact<=200,closed_form";
  a.a1 = Enclosure(0.01, 0.02);
  a.a2 = Enclosure(10, 11);
  a.a3 = Enclosure(1, 2);
  a.k_s = "123456789012345678901234567890";
  a.k_s_log2 = Enclosure(68.4, 68.5);
  a.h_lo = 680;
  a.h_hi = 748;
  a.step_ratio = 1.1;
  a.margin_lo = Enclosure(-3, -2);
  a.margin_hi = Enclosure(-5, -4);
  a.loose_margin_lo = Enclosure(-1, -0.5);
  a.loose_margin_hi = Enclosure(-2, -1.5);
  nlohmann::json ja = a;
  EXPECT_EQ(ja["check_kind"], "abc_sweep");
  EXPECT_FALSE(ja.contains("signature_class"));
  ExclusionCertificate a2 = nlohmann::json::parse(ja.dump()).get<ExclusionCertificate>();
  EXPECT_EQ(nlohmann::json(a2), ja);

  ExclusionCertificate b = a;
  b.check_kind = CheckKind::fermat_case;
  b.S.excluded = {13};
  b.signature_class = "(3,3)";
  b.b1 = Enclosure(0.5, 0.6);
  b.b2 = Enclosure(3, 4);
  b.L = Enclosure(20000, 20001);
  b.extremal = {{{"r", 3}, {"s", 4}, {"t", 3}}};
  nlohmann::json jb = b;
  EXPECT_FALSE(jb.contains("h_range"));
  EXPECT_EQ(jb["excluded_interval"]["U"], enclosure_json(b.k_s_log2));
  ExclusionCertificate b2 = nlohmann::json::parse(jb.dump()).get<ExclusionCertificate>();
  EXPECT_EQ(nlohmann::json(b2), jb);
  EXPECT_EQ(b2.S.excluded, std::vector<std::uint64_t>{13});

  jb["check_kind"] = "other";
  EXPECT_THROW(jb.get<ExclusionCertificate>(), std::invalid_argument);
}

TEST(SearchReportJson, Fields) {
  SearchReport r = search(30, 2, true);
  nlohmann::json j = r;
  EXPECT_EQ(j["kind"], "power_search");
  EXPECT_EQ(j["schema"], kSchemaVersion);
  EXPECT_EQ(j["solutions"].size(), r.solutions.size());
  const auto& s = j["solutions"][0];
  EXPECT_TRUE(s["x"].is_string());
  EXPECT_LE(s["h"]["lo"].get<double>(), s["h"]["hi"].get<double>());
  EXPECT_DOUBLE_EQ(j["caps"]["log2_zt_max"].get<double>(), search_caps(30, 2).log2_zt_max);
}
