#include "effabc/fermat_bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace effabc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Enclosure q(long a, long b = 1) { return Enclosure::from_rational(mpq_class(a, b)); }

Enclosure four_log2() { return 4.0 * log2_enclosure(); }

nlohmann::json case_json(const CaseUse& u) {
  return {{"case", to_string(u.which)}, {"r_prime", u.at.r_prime}, {"s_prime", u.at.s_prime}, {"t", u.at.t}};
}

}  // namespace

std::string to_string(B1Case c) {
  switch (c) {
    case B1Case::a: return "a";
    case B1Case::b: return "b";
    default: return "c";
  }
}

bool case_applies(B1Case c, const ExponentTuple& e) {
  // 2/s' against 1/r' + 1/t, compared as 2 r' t against s' (t + r')
  const long lhs = 2L * e.r_prime * e.t, rhs = static_cast<long>(e.s_prime) * (e.t + e.r_prime);
  switch (c) {
    case B1Case::a: return lhs <= rhs;
    case B1Case::b: return lhs >= rhs;
    default: return e.t == e.r_prime;
  }
}

void SignatureClass::validate() const {
  if (cover.empty()) throw std::invalid_argument("class " + label + " has no case cover");
  for (const auto& u : cover) {
    if (u.at.r_prime > u.at.s_prime || u.at.r_prime < 3 || u.at.t < 3)
      throw std::invalid_argument("bad extremal tuple in " + label);
    if (!case_applies(u.which, u.at))
      throw std::invalid_argument("case " + to_string(u.which) + " does not apply at the extremal tuple of " + label);
    if (u.at.u0() < u0) throw std::invalid_argument("extremal tuple below the class minimum in " + label);
  }
}

std::vector<SignatureClass> table1_classes() {
  std::vector<SignatureClass> out;
  auto add = [&](std::string label, ConstraintKind kind, int u0, int published, std::vector<CaseUse> cover) {
    SignatureClass c{std::move(label), kind, u0, published, std::move(cover)};
    c.validate();
    out.push_back(std::move(c));
  };
  // min{r,s,t} >= m: both regions are worst at r' = s' = t = m
  const int mins[] = {8, 7, 6, 5, 4};
  const int min_published[] = {573, 635, 697, 907, 2283};
  for (int i = 0; i < 5; ++i) {
    int m = mins[i];
    add("min>=" + std::to_string(m), ConstraintKind::lower_bound, m, min_published[i],
        {{B1Case::a, {m, m, m}}, {B1Case::b, {m, m, m}}});
  }
  // (r', t) = (3, 3): every tuple has t = r'; (3,3,3) itself has no solutions (Euler), so s' >= 4
  add("(3,3)", ConstraintKind::exact, 3, 24626, {{B1Case::c, {3, 4, 3}}});
  // (3, 4): s' >= 4 falls in region (a), s' = 3 in region (b)
  add("(3,4)", ConstraintKind::exact, 3, 14750, {{B1Case::a, {3, 4, 4}}, {B1Case::b, {3, 3, 4}}});
  // (3, t >= 5): third terms decrease in t
  add("(3,n>=5)", ConstraintKind::lower_bound, 3, 6648, {{B1Case::a, {3, 5, 5}}, {B1Case::b, {3, 3, 5}}});
  // (4, 3): 2/s' <= 1/2 < 1/4 + 1/3, region (a) only
  add("(4,3)", ConstraintKind::exact, 3, 7254, {{B1Case::a, {4, 4, 3}}});
  // (r' >= 5, 3): region (a) only, worst at r' = 5
  add("(n>=5,3)", ConstraintKind::lower_bound, 3, 3406, {{B1Case::a, {5, 5, 3}}});
  return out;
}

const SignatureClass& table1_class(const std::string& label) {
  static const std::vector<SignatureClass> all = table1_classes();
  for (const auto& c : all)
    if (c.label == label) return c;
  throw std::invalid_argument("unknown signature class " + label);
}

Enclosure b1_case(B1Case which, const ExponentTuple& e, const CombinerParams& p) {
  const Enclosure c = 3.0 + p.a1;
  const Enclosure X = Enclosure::from_uint(p.k) / Enclosure::from_uint(p.n()) + c / Enclosure::from_uint(p.p0);
  const Enclosure r = Enclosure(e.r_prime), s = Enclosure(e.s_prime), t = Enclosure(e.t), u0 = Enclosure(e.u0());
  switch (which) {
    case B1Case::a:
      return max(max(X, 0.5 * X + c / (2.0 * u0)), c * (1.0 / (2.0 * r) + 1.0 / (2.0 * t)));
    case B1Case::b:
      return max(max(X, X / 3.0 + 2.0 * c / (3.0 * r)), c * (2.0 / (3.0 * r) + 1.0 / (3.0 * t)));
    default: {
      Enclosure d = 3.0 * t - 1.0;
      return max(max(X, X * (t - 1.0) / d + 2.0 * c / d), c * (2.0 * s + t - 1.0) / (s * d));
    }
  }
}

Enclosure b1_value(const SignatureClass& cls, const CombinerParams& p) {
  Enclosure best = b1_case(cls.cover.front().which, cls.cover.front().at, p);
  for (std::size_t i = 1; i < cls.cover.size(); ++i) best = max(best, b1_case(cls.cover[i].which, cls.cover[i].at, p));
  return best;
}

Enclosure b2_value(const SignatureClass& cls, const CombinerParams& p) {
  return p.a2 + (3.0 + p.a1) * (p.a3 + four_log2() / Enclosure(cls.u0));
}

std::pair<Enclosure, Enclosure> b1_b2(const SignatureClass& cls, const CombinerParams& p) {
  if (!cls.allow_13() && p.p0 == 13) throw std::domain_error("13 is not admissible when u0 < 4");
  if (!cls.allow_13() && p.S.window_lo < 13 && p.S.window_hi >= 13 &&
      std::find(p.S.excluded.begin(), p.S.excluded.end(), 13) == p.S.excluded.end())
    throw std::domain_error("13 is not admissible when u0 < 4");
  if (p.p0 < 11) throw std::domain_error("S must consist of primes >= 11");
  return {b1_value(cls, p), b2_value(cls, p)};
}

std::optional<ExclusionCertificate> exclusion_interval(const SignatureClass& cls, const CombinerParams& p,
                                                       const std::string& vol_policy) {
  auto [b1, b2] = b1_b2(cls, p);
  if (!(b1.hi() < 1)) return std::nullopt;
  Enclosure L = b2 / (1.0 - b1);
  Enclosure U = Enclosure::from_mpz(p.k_S) * log2_enclosure();
  if (!(L.hi() < U.lo())) return std::nullopt;
  ExclusionCertificate c;
  c.check_kind = CheckKind::fermat_case;
  c.S = p.S;
  c.k = p.k;
  c.dataset = to_string(cls.dataset());
  c.vol_policy = vol_policy;
  c.a1 = p.a1;
  c.a2 = p.a2;
  c.a3 = p.a3;
  c.k_s = p.k_S.get_str();
  c.k_s_log2 = U;
  c.signature_class = cls.label;
  c.b1 = b1;
  c.b2 = b2;
  c.L = L;
  c.extremal = nlohmann::json::array();
  for (const auto& u : cls.cover) c.extremal.push_back(case_json(u));
  return c;
}

namespace {

void add_factors(const mpz_class& base, unsigned mult, std::map<std::uint64_t, std::uint64_t>& into) {
  if (base <= 1) return;
  const FactoredInteger f = FactoredInteger::factor(base);  // factors() refers into f
  for (auto [p, e] : f.factors()) into[p] += e * mult;
}

}  // namespace

std::vector<RadicalCheck> radical_bound_checks(const FermatSolution& sol, std::uint64_t subset_mask) {
  if (sol.x < 1 || sol.y < 1 || sol.z < 1 || sol.r == 0 || sol.s == 0 || sol.t == 0)
    throw std::domain_error("need a positive solution");
  mpz_class a, b, c;
  mpz_pow_ui(a.get_mpz_t(), sol.x.get_mpz_t(), sol.r);
  mpz_pow_ui(b.get_mpz_t(), sol.y.get_mpz_t(), sol.s);
  mpz_pow_ui(c.get_mpz_t(), sol.z.get_mpz_t(), sol.t);
  if (a + b != c) throw std::domain_error("not a solution");
  if (gcd(gcd(sol.x, sol.y), sol.z) != 1) throw std::domain_error("not primitive");

  std::map<std::uint64_t, std::uint64_t> f;
  add_factors(sol.x, sol.r, f);
  add_factors(sol.y, sol.s, f);
  add_factors(sol.z, sol.t, f);
  if (auto it = f.find(2); it != f.end()) {  // N = abc / gcd(16, abc)
    it->second -= std::min<std::uint64_t>(it->second, 4);
    if (it->second == 0) f.erase(it);
  }
  FactoredInteger N(f);
  std::map<std::uint64_t, std::uint64_t> fc;
  std::size_t i = 0;
  for (auto [p, e] : N.factors()) {
    if (i < 64 && ((subset_mask >> i) & 1)) fc[p] = e;
    ++i;
  }
  FactoredInteger NC(fc);
  const Enclosure h = N.h(), hC = NC.h(), lhs = NC.rad_log();

  const int r = static_cast<int>(std::min(sol.r, sol.s)), s = static_cast<int>(std::max(sol.r, sol.s));
  const int t = static_cast<int>(sol.t), u0 = std::min(r, t);
  const Enclosure R(r), Sx(s), T(t), U0(u0), tail = four_log2() / U0;
  std::vector<RadicalCheck> out;
  auto add = [&](std::string name, Enclosure rhs) {
    out.push_back({std::move(name), lhs, rhs, certainly_le(lhs, rhs)});
  };
  add("i", hC / U0 + tail);
  if (t <= r) add("ii", (hC - h) / R + (1.0 / (2.0 * T) + 1.0 / (2.0 * R)) * h + tail);
  if (t == r) add("iii", (hC - h) / Sx + (1.0 / T + 1.0 / Sx) * (2.0 * T * h / (3.0 * T - 1.0)) + tail);
  if (t >= r) {
    Enclosure ubar = (1.0 / Enclosure(static_cast<double>(sol.r)) + 1.0 / Enclosure(static_cast<double>(sol.s)) + 1.0 / T) / 3.0;
    add("iv", (hC - h) / T + max(1.0 / (2.0 * T) + 1.0 / (2.0 * R), ubar) * h + tail);
  }
  ExponentTuple e{r, s, t};
  if (case_applies(B1Case::a, e))
    add("remark_a", (hC - h) / Enclosure(std::max(r, t)) + (1.0 / (2.0 * T) + 1.0 / (2.0 * R)) * h + tail);
  if (case_applies(B1Case::b, e)) add("remark_b", (hC - h) / T + (2.0 / (3.0 * R) + 1.0 / (3.0 * T)) * h + tail);
  return out;
}

bool radical_bound_check(const FermatSolution& sol, std::uint64_t subset_mask) {
  auto checks = radical_bound_checks(sol, subset_mask);
  return std::all_of(checks.begin(), checks.end(), [](const RadicalCheck& c) { return c.holds; });
}

void to_json(nlohmann::json& j, const Table1Row& r) {
  j = {{"class", r.cls.label},
       {"published", r.cls.published_bound},
       {"computed", enclosure_json(r.computed)},
       {"ratio", r.computed.hi() / r.cls.published_bound},
       {"tolerance", r.tolerance},
       {"passed", r.passed},
       {"dataset", to_string(r.cls.dataset())},
       {"certificates", r.chain.size()},
       {"wall_ms", r.wall_ms}};
}

std::uint64_t table1_l_max() { return 60000; }

namespace {

constexpr std::size_t kStartSpan = 400;
constexpr std::size_t kMaxWindow = 3000;

struct Candidate {
  double L_hi = std::numeric_limits<double>::infinity();
  std::size_t i = 0, n = 0;
  int k = 0;
  bool better_than(const Candidate& o, const std::vector<std::uint64_t>& adm) const {
    if (L_hi != o.L_hi) return L_hi < o.L_hi;
    if (k == 0 || o.k == 0) return o.k == 0 && k != 0;
    if (adm[i] != adm[o.i]) return adm[i] < adm[o.i];
    if (n != o.n) return n < o.n;
    return k < o.k;
  }
};

PrimeWindow window_of(const std::vector<std::uint64_t>& adm, std::size_t i, std::size_t n, const VolTable& vt,
                      bool allow_13) {
  return make_window(vt, adm[i] - 1, adm[i + n - 1], allow_13);
}

}  // namespace

Table1Row table1_row(const SignatureClass& cls, const VolTable& vt) {
  auto t0 = Clock::now();
  if (vt.kind() != cls.dataset()) throw std::invalid_argument("Vol table dataset does not match the class");
  Table1Row row;
  row.cls = cls;
  std::vector<std::uint64_t> adm;
  for (auto p : vt.primes())
    if (p != 13 || cls.allow_13()) adm.push_back(p);
  const Enclosure ln2 = log2_enclosure();

  double U = kHeightCap;
  while (true) {
    Candidate best;
    for (int k : {2, 3}) {
      // first start whose k consecutive admissible primes multiply past U / log 2
      std::size_t i_min = 0;
      while (i_min + k <= adm.size()) {
        mpz_class prod = 1;
        for (int j = 0; j < k; ++j) prod *= static_cast<unsigned long>(adm[i_min + j]);
        if (certainly_gt(Enclosure::from_mpz(prod) * ln2, Enclosure(U))) break;
        ++i_min;
      }
      std::size_t i_end = std::min(adm.size(), i_min + kStartSpan);
      std::vector<Candidate> local(i_end > i_min ? i_end - i_min : 0);
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t ii = static_cast<std::int64_t>(i_min); ii < static_cast<std::int64_t>(i_end); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        Candidate& bc = local[i - i_min];
        CombinerParams p;
        p.k = k;
        p.p0 = adm[i];
        for (std::size_t n = k; n <= kMaxWindow && i + n <= adm.size(); ++n) {
          p.S = window_of(adm, i, n, vt, cls.allow_13());
          auto s = vt.window_sums(p.S.window_lo, p.S.window_hi, p.S.excluded);
          Enclosure N = Enclosure::from_uint(s.n);
          p.a1 = s.a1_sum / N;
          p.a2 = 3.0 * s.vol_sum / N;
          p.a3 = s.log_sum;
          Enclosure b1 = b1_value(cls, p);
          if (!(b1.hi() < 1)) continue;
          Enclosure L = b2_value(cls, p) / (1.0 - b1);
          Candidate c{L.hi(), i, n, k};
          if (c.better_than(bc, adm)) bc = c;
        }
      }
      for (const auto& c : local)
        if (c.better_than(best, adm)) best = c;
    }
    if (best.k == 0 || !(best.L_hi < U * (1 - 1e-12))) break;
    CombinerParams p = window_params(vt, window_of(adm, best.i, best.n, vt, cls.allow_13()), best.k);
    auto cert = exclusion_interval(cls, p, vt.policy());
    if (!cert || !(cert->k_s_log2.lo() > U)) break;
    U = cert->L.hi();
    row.chain.push_back(std::move(*cert));
  }
  row.computed = Enclosure(U) + four_log2();
  if (row.chain.empty()) row.computed = Enclosure(kHeightCap) + four_log2();
  row.passed = !row.chain.empty() && row.computed.hi() <= row.tolerance * cls.published_bound &&
               check_chain(row.chain, U, kHeightCap).ok;
  row.wall_ms = ms_since(t0);
  return row;
}

std::vector<Table1Row> table1(const PrimeTables& tables, const std::vector<std::string>& labels) {
  std::vector<SignatureClass> classes;
  for (const auto& c : table1_classes())
    if (labels.empty() || std::find(labels.begin(), labels.end(), c.label) != labels.end()) classes.push_back(c);
  std::optional<VolTable> vr, vrp;
  std::vector<Table1Row> rows;
  for (const auto& c : classes) {
    auto& slot = c.dataset() == DatasetKind::R ? vr : vrp;
    if (!slot) slot = VolTable::build(table1_l_max(), c.dataset(), tables);
    rows.push_back(table1_row(c, *slot));
  }
  return rows;
}

RecheckResult recheck_fermat(const ExclusionCertificate& c, const VolTable& vt) {
  if (c.check_kind != CheckKind::fermat_case) return {false, "not a Fermat certificate"};
  const SignatureClass* cls = nullptr;
  try {
    cls = &table1_class(c.signature_class);
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
  if (c.dataset != to_string(vt.kind()) || vt.kind() != cls->dataset()) return {false, "dataset mismatch"};
  if (c.vol_policy != vt.policy()) return {false, "Vol policy mismatch"};
  if (c.S.window_hi > vt.l_max()) return {false, "Vol table does not reach the window"};
  auto primes = window_primes(vt, c.S);
  if (primes.size() != c.S.n) return {false, "window size mismatch"};
  for (auto p : primes)
    if (p == 13 && !cls->allow_13()) return {false, "13 in S while u0 < 4"};
  CombinerParams p = direct_params(primes, c.k, [&](std::uint64_t l) { return vt.vol(l); });
  p.S = c.S;
  if (p.k_S.get_str() != c.k_s) return {false, "k(S) mismatch"};
  if (!c.a1.overlaps(p.a1) || !c.a2.overlaps(p.a2) || !c.a3.overlaps(p.a3)) return {false, "a1/a2/a3 mismatch"};
  auto [b1, b2] = b1_b2(*cls, p);
  if (!(b1.hi() < 1)) return {false, "b1 not below 1"};
  Enclosure L = b2 / (1.0 - b1), U = Enclosure::from_mpz(p.k_S) * log2_enclosure();
  if (!(L.hi() < U.lo())) return {false, "empty interval"};
  if (!L.overlaps(c.L) || !U.overlaps(c.k_s_log2) || !b1.overlaps(c.b1)) return {false, "recorded values not reproduced"};
  return {true, ""};
}

RecheckResult check_chain(const std::vector<ExclusionCertificate>& chain, double bound, double cap) {
  std::vector<std::pair<double, double>> iv;  // open (L.hi, U.lo)
  for (const auto& c : chain) iv.emplace_back(c.L.hi(), c.k_s_log2.lo());
  std::sort(iv.begin(), iv.end());
  // points in (bound, cap) are all needed; `reach` itself still needs covering once we pass bound
  double reach = bound;
  bool reach_needed = false;
  for (auto [L, U] : iv) {
    bool starts_in_time = reach_needed ? L < reach : L <= reach;
    if (!starts_in_time) break;
    if (U > reach) {
      reach = U;
      reach_needed = true;
    }
  }
  if (reach < cap) return {false, "chain stops at " + std::to_string(reach)};
  return {true, ""};
}

SweepCertificate height_cap_certificate() {
  auto t0 = Clock::now();
  SweepCertificate c;
  c.kind = "height_cap";
  c.range_lo = kHeightCap;
  c.range_hi = 1e15;
  c.grid = "2001 log-spaced points for the derivative";
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool ok) {
    checks.push_back({{"name", name}, {"holds", ok}});
    all = all && ok;
  };

  // h/16 - 9 sqrt(h log h) > 0 at the cap and increasing beyond it
  Enclosure H(kHeightCap);
  Enclosure g = H / 16.0 - 9.0 * sqrt(H * log(H));
  record("cap_gap_positive", g.lo() > 0);
  Enclosure worst(std::numeric_limits<double>::infinity());
  double worst_at = 0;
  for (int i = 0; i <= 2000; ++i) {
    Enclosure x(kHeightCap * std::pow(1e9, i / 2000.0));
    Enclosure lx = log(x);
    Enclosure d = q(1, 16) - 9.0 * (lx + 1.0) / (2.0 * sqrt(x * lx));
    if (d.lo() < worst.lo()) {
      worst = d;
      worst_at = x.mid();
    }
  }
  record("cap_gap_increasing", worst.lo() > 0);

  // log rad(abc) <= log(xyz) < (5/16) h, exponent bookkeeping of the three cases
  const mpq_class five16(5, 16);
  // t >= 4: abc > a^(12/11) b^(12/11) c^(9/11) because c > a, b
  record("t>=4_weights_sum_to_3", mpq_class(12, 11) + mpq_class(12, 11) + mpq_class(9, 11) == 3);
  record("t>=4_exponents", mpq_class(12 * 3, 11) >= mpq_class(36, 11) && mpq_class(9 * 4, 11) >= mpq_class(36, 11));
  record("t>=4_ratio", mpq_class(11, 36) < five16);
  // s >= r >= 4: 2^(1/7) abc >= a^(6/7) b^(6/7) c^(8/7) because 2ab >= c
  record("r>=4_weights", mpq_class(6, 7) + mpq_class(6, 7) + mpq_class(8, 7) + mpq_class(1, 7) == 3);
  record("r>=4_exponents", mpq_class(6 * 4, 7) >= mpq_class(24, 7) && mpq_class(8 * 3, 7) >= mpq_class(24, 7));
  // (5/16 - 7/24) h >= log 2 / 24 exactly when h >= 2 log 2
  record("r>=4_threshold", (five16 - mpq_class(7, 24)) * 2 == mpq_class(1, 24));
  // s >= 4, r = t = 3: lambda = (s-3)/(s+1), and 3 + lambda = s(1 - lambda) = 4s/(s+1) >= 16/5
  bool lam = true;
  for (int s = 4; s <= 1000; ++s) {
    mpq_class l(s - 3, s + 1);
    lam = lam && (3 + l == s * (1 - l)) && (3 + l >= mpq_class(16, 5));
  }
  record("r=t=3_lambda", lam && mpq_class(1, 1) / mpq_class(16, 5) == five16);
  // and the combination (3 * 5/16 = 15/16) used with the abc inequality
  record("fifteen_sixteenths", 3 * five16 == mpq_class(15, 16) && mpq_class(15, 16) + mpq_class(1, 16) == 1);

  c.worst_margin = g;
  c.worst_at = kHeightCap;
  c.passed = all;
  c.details = {{"checks", checks}, {"min_derivative", enclosure_json(worst)}, {"min_derivative_at", worst_at}};
  c.duration_ms = ms_since(t0);
  return c;
}

SweepCertificate flt_contradiction(std::uint64_t p, const Enclosure& fermat_bound) {
  auto t0 = Clock::now();
  if (p < 11 || !is_prime_u64(p)) throw std::domain_error("p must be a prime >= 11");
  if (!(fermat_bound.lo() > 0)) throw std::domain_error("bound must be positive");
  auto sides = [&](double pp) {
    Enclosure P(pp);
    return std::pair{fermat_bound / (3.0 * P - 1.0), P * log(P + 1.0) - log2_enclosure()};
  };
  auto [lhs, rhs] = sides(static_cast<double>(p));
  SweepCertificate c;
  c.kind = "flt_contradiction";
  c.range_lo = static_cast<double>(p);
  c.range_hi = std::numeric_limits<double>::infinity();
  c.grid = "derivative of p log(p+1) on 2001 points in [p, 1e9]";
  c.worst_margin = rhs - lhs;
  c.worst_at = static_cast<double>(p);
  Verdict v = decide_lt(lhs, rhs);
  // the left side falls and the right side grows with p
  bool grows = true;
  for (int i = 0; i <= 2000; ++i) {
    Enclosure x(static_cast<double>(p) * std::pow(1e9 / static_cast<double>(p), i / 2000.0));
    Enclosure d = log(x + 1.0) + x / (x + 1.0);
    grows = grows && d.lo() > 0;
  }
  c.details = {{"p", p},
               {"bound", enclosure_json(fermat_bound)},
               {"log_z_minus_1_upper", enclosure_json(lhs)},
               {"log_z_minus_1_lower", enclosure_json(rhs)},
               {"rhs_increasing", grows},
               {"external_input", "z > (p+1)^p / 2 for primitive Fermat solutions"}};
  c.duration_ms = ms_since(t0);
  if (v == Verdict::indecisive) throw IndecisiveError("FLT comparison indecisive", static_cast<double>(p), lhs, rhs);
  c.passed = v == Verdict::holds && grows;
  return c;
}

SweepCertificate cor48_33n_check(const Enclosure& bound_33n) {
  auto t0 = Clock::now();
  Enclosure n_max = bound_33n / log2_enclosure();
  Enclosure literature(1e9);
  SweepCertificate c;
  c.kind = "cor48_33n";
  c.range_lo = 3;
  c.range_hi = std::numeric_limits<double>::infinity();
  c.grid = "single comparison";
  c.worst_margin = literature - n_max;
  c.worst_at = n_max.mid();
  c.details = {{"bound", enclosure_json(bound_33n)},
               {"n_upper", enclosure_json(n_max)},
               {"external_input", "n > 1e9 for primitive solutions of signature (3,3,n)"}};
  c.duration_ms = ms_since(t0);
  Verdict v = decide_lt(n_max, literature);
  if (v == Verdict::indecisive) throw IndecisiveError("(3,3,n) comparison indecisive", 0, n_max, literature);
  c.passed = v == Verdict::holds;
  return c;
}

}  // namespace effabc
