#include "effabc/power_search.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <omp.h>

namespace effabc {

namespace {

using Clock = std::chrono::steady_clock;
using u128 = unsigned __int128;

constexpr std::uint64_t kP1 = (1ull << 61) - 1;
constexpr std::uint64_t kP2 = 0xFFFFFFFFFFFFFFC5ull;  // 2^64 - 59

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t m) { return a >= b ? a - b : a + (m - b); }

mpz_class pow_ui(const mpz_class& b, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

std::uint64_t hash_slot(std::uint64_t r1, std::size_t mask) {
  return (r1 * 0x9E3779B97F4A7C15ull >> 17) & mask;
}

}  // namespace

Digest digest_of(const mpz_class& v) {
  if (sgn(v) < 0) throw std::domain_error("digest of a negative value");
  return {mpz_fdiv_ui(v.get_mpz_t(), kP1), mpz_fdiv_ui(v.get_mpz_t(), kP2)};
}

Digest digest_pow(std::uint64_t m, std::uint64_t k) {
  Digest d{1 % kP1, 1};
  std::uint64_t b1 = m % kP1, b2 = m % kP2;
  for (; k; k >>= 1) {
    if (k & 1) {
      d.r1 = mulmod(d.r1, b1, kP1);
      d.r2 = mulmod(d.r2, b2, kP2);
    }
    b1 = mulmod(b1, b1, kP1);
    b2 = mulmod(b2, b2, kP2);
  }
  return d;
}

Digest digest_sub(const Digest& a, const Digest& b) { return {submod(a.r1, b.r1, kP1), submod(a.r2, b.r2, kP2)}; }

PerfectPowerIndex PerfectPowerIndex::build(unsigned k_min, const mpz_class& v_max) {
  if (k_min < 2) throw std::domain_error("k_min must be at least 2");
  if (v_max < pow_ui(2, k_min)) throw std::domain_error("V_max below 2^k_min");
  PerfectPowerIndex idx;
  idx.k_min_ = k_min;
  idx.v_max_ = v_max;
  long e2;
  double m2 = mpz_get_d_2exp(&e2, v_max.get_mpz_t());
  idx.log2_vmax_ = std::log2(m2) + static_cast<double>(e2);

  mpz_class root;
  mpz_root(root.get_mpz_t(), v_max.get_mpz_t(), k_min);
  if (!root.fits_ulong_p() || root > 0xFFFFFFFFu) throw IndexCapacityError("base range too large", root.get_d());
  const auto M = static_cast<std::uint32_t>(root.get_ui());
  // rough count: sum over k of V_max^(1/k)
  double estimate = 0;
  for (unsigned k = k_min; k <= idx.log2_vmax_ + 1; ++k) estimate += std::exp2(idx.log2_vmax_ / k);
  if (estimate > kMaxEntries) throw IndexCapacityError("perfect power index would need about " +
                                                           std::to_string(static_cast<std::uint64_t>(estimate)) + " entries",
                                                       estimate);

  std::vector<std::uint8_t> is_power(static_cast<std::size_t>(M) + 1, 0);
  for (std::uint64_t b = 2; b * b <= M; ++b) {
    if (is_power[b]) continue;
    for (std::uint64_t v = b * b; v <= M; v *= b) is_power[v] = 1;
  }
  for (std::uint64_t m = 2; m <= M; ++m) {
    if (is_power[m]) continue;
    const double lm = std::log2(static_cast<double>(m));
    auto k_hi = static_cast<unsigned>(std::floor(idx.log2_vmax_ / lm + 1e-9)) + 1;
    // settle the boundary exactly
    while (k_hi >= k_min && pow_ui(mpz_class(static_cast<unsigned long>(m)), k_hi) > v_max) --k_hi;
    for (unsigned k = k_min; k <= k_hi; ++k)
      idx.entries_.push_back({static_cast<std::uint32_t>(m), k, k * lm, digest_pow(m, k)});
  }
  std::sort(idx.entries_.begin(), idx.entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.log2v != b.log2v) return a.log2v < b.log2v;
    return pow_ui(a.base, a.exp) < pow_ui(b.base, b.exp);
  });
  idx.index_digests();
  return idx;
}

PerfectPowerIndex PerfectPowerIndex::build_log2(unsigned k_min, double log2_vmax) {
  mpz_class v = pow_ui(2, static_cast<unsigned long>(std::ceil(std::max(log2_vmax, static_cast<double>(k_min)))));
  return build(k_min, v);
}

void PerfectPowerIndex::index_digests() {
  std::size_t cap = std::bit_ceil(std::max<std::size_t>(16, 2 * entries_.size()));
  slots_.assign(cap, 0);
  const std::size_t mask = cap - 1;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    std::size_t s = hash_slot(entries_[i].digest.r1, mask);
    for (; slots_[s]; s = (s + 1) & mask)
      // lookups stop at the first match, so a shared digest would hide an entry
      if (entries_[slots_[s] - 1].digest == entries_[i].digest)
        throw std::logic_error("two index values share a digest");
    slots_[s] = static_cast<std::uint32_t>(i + 1);
  }
}

mpz_class PerfectPowerIndex::value(std::size_t i) const { return pow_ui(entries_.at(i).base, entries_.at(i).exp); }

std::vector<std::pair<mpz_class, unsigned>> PerfectPowerIndex::representations(std::size_t i) const {
  const Entry& e = entries_.at(i);
  std::vector<std::pair<mpz_class, unsigned>> out;
  for (unsigned d = 1; d <= e.exp; ++d)
    if (e.exp % d == 0 && e.exp / d >= k_min_) out.emplace_back(pow_ui(e.base, d), e.exp / d);
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> PerfectPowerIndex::find_digest(const Digest& d) const {
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t s = hash_slot(d.r1, mask); slots_[s]; s = (s + 1) & mask) {
    std::size_t i = slots_[s] - 1;
    if (entries_[i].digest == d) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> PerfectPowerIndex::find(const mpz_class& v) const {
  if (v < 2 || v > v_max_) return std::nullopt;
  auto i = find_digest(digest_of(v));
  if (i && value(*i) == v) return i;
  return std::nullopt;
}

std::size_t PerfectPowerIndex::count_log2_below(double x) const {
  return static_cast<std::size_t>(
      std::partition_point(entries_.begin(), entries_.end(), [x](const Entry& e) { return e.log2v < x; }) -
      entries_.begin());
}

bool SolutionRecord::operator<(const SolutionRecord& o) const {
  auto key = [](const SolutionRecord& s) { return std::tie(s.z, s.t, s.x, s.r, s.y, s.s); };
  return key(*this) < key(o);
}

bool SolutionRecord::operator==(const SolutionRecord& o) const {
  return x == o.x && y == o.y && z == o.z && r == o.r && s == o.s && t == o.t;
}

void to_json(nlohmann::json& j, const SolutionRecord& s) {
  j = {{"x", s.x.get_str()}, {"y", s.y.get_str()}, {"z", s.z.get_str()}, {"r", s.r},
       {"s", s.s},           {"t", s.t},           {"h", enclosure_json(s.h)}, {"primitive", s.primitive}};
}

bool verify_solution(const SolutionRecord& s) {
  mpz_class lhs = pow_ui(s.x, s.r) + pow_ui(s.y, s.s), rhs = pow_ui(s.z, s.t);
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), s.x.get_mpz_t(), s.y.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), s.z.get_mpz_t());
  return lhs == rhs && (g == 1) == s.primitive;
}

void to_json(nlohmann::json& j, const SearchReport& r) {
  j = {{"schema", kSchemaVersion},
       {"kind", "power_search"},
       {"h_max", r.h_max},
       {"k_min", r.k_min},
       {"primitive_only", r.primitive_only},
       {"caps",
        {{"log2_zt_max", r.caps.log2_zt_max},
         {"zt_rule", "z^t <= 2 sqrt(2 e^h / 2^k_min)"},
         {"xr_rule", "x^r <= min(z^t / 2, 4 e^h / (z^t)^2)"}}},
       {"index_size", r.index_size},
       {"candidates_tested", r.candidates_tested},
       {"digest_hits", r.digest_hits},
       {"solutions", r.solutions},
       {"boundary", r.boundary},
       {"one_base", r.one_base},
       {"exhaustive", r.exhaustive},
       {"duration_ms", r.duration_ms}};
}

SearchCaps search_caps(double h_max, unsigned k_min) {
  SearchCaps c;
  const double log2_eh = h_max / std::log(2.0);
  c.log2_zt_max = (1 + log2_eh - k_min) / 2 + 1;
  return c;
}

namespace {

// a little over the rounding error of K log2 m
constexpr double kLogSlack = 1e-9;

void emit(const PerfectPowerIndex& idx, std::size_t ix, std::size_t iy, std::size_t iv, double h_max,
          bool primitive_only, std::vector<SolutionRecord>& sols, std::vector<SolutionRecord>& boundary) {
  for (const auto& [x, r] : idx.representations(ix))
    for (const auto& [y, s] : idx.representations(iy))
      for (const auto& [z, t] : idx.representations(iv)) {
        SolutionRecord rec{x, y, z, r, s, t, Enclosure(0.0), false};
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
        rec.primitive = g == 1;
        if (primitive_only && !rec.primitive) continue;
        rec.h = log_of(pow_ui(x, r)) + log_of(pow_ui(y, s)) + log_of(pow_ui(z, t));
        if (rec.h.hi() < h_max) sols.push_back(rec);
        else if (rec.h.lo() < h_max) boundary.push_back(rec);
      }
}

}  // namespace

SearchReport search_with_index(const PerfectPowerIndex& idx, double h_max, bool primitive_only, bool parallel) {
  auto t0 = Clock::now();
  if (!(h_max > 0) || h_max > kSearchHardCap) throw std::domain_error("h_max must lie in (0, 700]");
  SearchReport rep;
  rep.h_max = h_max;
  rep.k_min = idx.k_min();
  rep.primitive_only = primitive_only;
  rep.caps = search_caps(h_max, idx.k_min());
  rep.index_size = idx.size();
  if (idx.log2_vmax() < rep.caps.log2_zt_max) throw std::out_of_range("index does not reach the z^t cap");

  const double log2_eh = h_max / std::log(2.0);
  const std::size_t nV = idx.count_log2_below(rep.caps.log2_zt_max + kLogSlack);
  const int threads = parallel ? omp_get_max_threads() : 1;
  std::vector<std::vector<SolutionRecord>> sols(threads), bnd(threads);
  std::vector<std::uint64_t> tested(threads, 0), hits(threads, 0);

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::int64_t iv = 0; iv < static_cast<std::int64_t>(nV); ++iv) {
    const int tid = omp_get_thread_num();
    const auto& V = idx[iv];
    // x^r <= y^s, and x^r (z^t)^2 / 2 <= x^r y^s z^t < e^h with a factor 2 of slack
    double xcap = std::min(V.log2v - 1, log2_eh + 2 - 2 * V.log2v) + kLogSlack;
    std::size_t nX = idx.count_log2_below(xcap);
    tested[tid] += nX;
    for (std::size_t ix = 0; ix < nX; ++ix) {
      auto iy = idx.find_digest(digest_sub(V.digest, idx[ix].digest));
      if (!iy) continue;
      ++hits[tid];
      mpz_class v = idx.value(iv), x = idx.value(ix), y = idx.value(*iy);
      if (x + y != v || x > y) continue;
      emit(idx, ix, *iy, iv, h_max, primitive_only, sols[tid], bnd[tid]);
    }
  }
  for (int t = 0; t < threads; ++t) {
    rep.solutions.insert(rep.solutions.end(), sols[t].begin(), sols[t].end());
    rep.boundary.insert(rep.boundary.end(), bnd[t].begin(), bnd[t].end());
    rep.candidates_tested += tested[t];
    rep.digest_hits += hits[t];
  }
  std::sort(rep.solutions.begin(), rep.solutions.end());
  std::sort(rep.boundary.begin(), rep.boundary.end());
  rep.one_base = one_base_scan(idx, h_max);
  rep.duration_ms = ms_since(t0);
  return rep;
}

SearchReport search(double h_max, unsigned k_min, bool primitive_only) {
  if (h_max > kSearchHardCap) throw std::domain_error("h_max above the hard cap 700");
  auto idx = PerfectPowerIndex::build_log2(k_min, search_caps(h_max, k_min).log2_zt_max);
  return search_with_index(idx, h_max, primitive_only, true);
}

SearchReport search_serial(double h_max, unsigned k_min, bool primitive_only) {
  if (h_max > kSearchHardCap) throw std::domain_error("h_max above the hard cap 700");
  auto idx = PerfectPowerIndex::build_log2(k_min, search_caps(h_max, k_min).log2_zt_max);
  return search_with_index(idx, h_max, primitive_only, false);
}

std::vector<SolutionRecord> one_base_scan(const PerfectPowerIndex& idx, double h_max) {
  // 1 + y^s = z^t: y^s z^t > (z^t)^2 / 2, so log2 z^t < (log2 e^h + 1)/2
  const double cap = (h_max / std::log(2.0) + 1) / 2 + kLogSlack;
  const Digest one{1, 1};
  std::vector<SolutionRecord> out;
  for (std::size_t iv = 0, n = idx.count_log2_below(cap); iv < n; ++iv) {
    auto iy = idx.find_digest(digest_sub(idx[iv].digest, one));
    if (!iy || idx.value(*iy) + 1 != idx.value(iv)) continue;
    for (const auto& [y, s] : idx.representations(*iy))
      for (const auto& [z, t] : idx.representations(iv)) {
        SolutionRecord rec{1, y, z, idx.k_min(), s, t, log_of(pow_ui(y, s)) + log_of(pow_ui(z, t)), true};
        if (rec.h.lo() < h_max) out.push_back(rec);
      }
  }
  return out;
}

bool prune_justified(const PerfectPowerIndex& idx, const PruneEvent& e, double h_max) {
  Enclosure lv = log_of(idx.value(e.v)), lx = log_of(idx.value(e.x));
  return certainly_le(Enclosure(h_max), lx + 2.0 * lv - log2_enclosure());
}

std::vector<PruneEvent> sample_prune_events(const PerfectPowerIndex& idx, double h_max, std::size_t count,
                                            std::uint64_t seed) {
  const auto caps = search_caps(h_max, idx.k_min());
  const double log2_eh = h_max / std::log(2.0);
  const std::size_t nV = idx.count_log2_below(caps.log2_zt_max + kLogSlack);
  std::vector<PruneEvent> out;
  std::mt19937_64 rng(seed);
  if (nV == 0) return out;
  std::uniform_int_distribution<std::size_t> pick(0, nV - 1);
  for (std::size_t tries = 0; out.size() < count && tries < 50 * count; ++tries) {
    std::size_t iv = pick(rng);
    const auto& V = idx[iv];
    double height_cap = log2_eh + 2 - 2 * V.log2v;
    if (height_cap >= V.log2v - 1) continue;  // pruned by x^r <= y^s, not by height
    std::size_t nX = idx.count_log2_below(height_cap + kLogSlack);
    if (nX >= idx.size()) continue;
    std::uniform_int_distribution<std::size_t> px(nX, std::min(idx.size(), nX + 64) - 1);
    out.push_back({iv, px(rng)});
  }
  return out;
}

std::vector<CatalogEntry> known_solutions() {
  struct Raw {
    const char* x;
    unsigned r;
    const char* y;
    unsigned s;
    const char* z;
    unsigned t;
    const char* text;
  };
  static const Raw raw[] = {
      {"1", 7, "2", 3, "3", 2, "1^n + 2^3 = 3^2 (n >= 7)"},
      {"2", 5, "7", 2, "3", 4, "2^5 + 7^2 = 3^4"},
      {"7", 3, "13", 2, "2", 9, "7^3 + 13^2 = 2^9"},
      {"2", 7, "17", 3, "71", 2, "2^7 + 17^3 = 71^2"},
      {"3", 5, "11", 4, "122", 2, "3^5 + 11^4 = 122^2"},
      {"17", 7, "76271", 3, "21063928", 2, "17^7 + 76271^3 = 21063928^2"},
      {"1414", 3, "2213459", 2, "65", 7, "1414^3 + 2213459^2 = 65^7"},
      {"9262", 3, "15312283", 2, "113", 7, "9262^3 + 15312283^2 = 113^7"},
      {"43", 8, "96222", 3, "30042907", 2, "43^8 + 96222^3 = 30042907^2"},
      {"33", 8, "1549034", 2, "15613", 3, "33^8 + 1549034^2 = 15613^3"},
  };
  std::vector<CatalogEntry> out;
  for (const auto& r : raw) {
    SolutionRecord s{mpz_class(r.x), mpz_class(r.y), mpz_class(r.z), r.r, r.s, r.t, Enclosure(0.0), true};
    s.h = log_of(pow_ui(s.y, s.s)) + log_of(pow_ui(s.z, s.t));
    if (s.x > 1) s.h += log_of(pow_ui(s.x, s.r));
    out.push_back({s, r.text});
  }
  return out;
}

SweepCertificate verify_catalog() {
  auto t0 = Clock::now();
  SweepCertificate c;
  c.kind = "catalog";
  c.grid = "exact";
  c.worst_margin = Enclosure(0.0);
  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  for (const auto& e : known_solutions()) {
    bool ok = verify_solution(e.sol) && e.sol.primitive;
    if (e.sol.x == 1)  // the exponent on the base 1 is arbitrary
      for (unsigned n = 7; n <= 64; ++n) ok = ok && pow_ui(e.sol.x, n) + pow_ui(e.sol.y, e.sol.s) == pow_ui(e.sol.z, e.sol.t);
    all = all && ok;
    list.push_back({{"identity", e.text}, {"holds", ok}, {"h", enclosure_json(e.sol.h)}});
  }
  c.range_lo = 0;
  c.range_hi = static_cast<double>(list.size());
  c.passed = all;
  c.details = {{"identities", list}};
  c.duration_ms = ms_since(t0);
  if (!all) throw std::logic_error("catalog identity failed in exact arithmetic");
  return c;
}

}  // namespace effabc
