#include "effabc/abc_verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>

namespace effabc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Enclosure log_u64(std::uint64_t p) { return log_of(static_cast<double>(p)); }

}  // namespace

FactoredInteger::FactoredInteger(std::map<std::uint64_t, std::uint64_t> factors) : factors_(std::move(factors)) {
  for (auto it = factors_.begin(); it != factors_.end();) {
    if (it->first < 2) throw std::invalid_argument("factor base must be prime");
    if (it->second == 0) it = factors_.erase(it);
    else ++it;
  }
}

FactoredInteger FactoredInteger::factor(const mpz_class& n, std::uint64_t bound) {
  if (n < 1) throw std::domain_error("can only factor positive integers");
  mpz_class m = n;
  std::map<std::uint64_t, std::uint64_t> f;
  for (std::uint32_t p : small_primes_upto(bound)) {
    if (m == 1) break;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
      ++f[p];
    }
  }
  if (m != 1) {
    if (m.fits_ulong_p() && is_prime_u64(m.get_ui())) ++f[m.get_ui()];
    else throw std::domain_error("cofactor " + m.get_str() + " not split by trial division");
  }
  return FactoredInteger(std::move(f));
}

std::uint64_t FactoredInteger::v(std::uint64_t p) const {
  auto it = factors_.find(p);
  return it == factors_.end() ? 0 : it->second;
}

mpz_class FactoredInteger::value() const {
  mpz_class r = 1, t;
  for (auto [p, e] : factors_) {
    mpz_ui_pow_ui(t.get_mpz_t(), p, e);
    r *= t;
  }
  return r;
}

Enclosure FactoredInteger::h() const {
  Enclosure s(0.0);
  for (auto [p, e] : factors_) s += Enclosure::from_uint(e) * log_u64(p);
  return s;
}

Enclosure FactoredInteger::rad_log() const {
  Enclosure s(0.0);
  for (auto [p, e] : factors_) s += log_u64(p);
  return s;
}

FactoredInteger FactoredInteger::part_divisible_by(std::uint64_t l) const {
  std::map<std::uint64_t, std::uint64_t> f;
  for (auto [p, e] : factors_)
    if (e % l == 0) f[p] = e;
  return FactoredInteger(std::move(f));
}

int log_combination_sign(const std::map<std::uint64_t, mpz_class>& coeffs) {
  Enclosure s(0.0);
  for (const auto& [q, c] : coeffs)
    if (sgn(c) != 0) s += Enclosure::from_mpz(c) * log_u64(q);
  if (s.lo() > 0) return 1;
  if (s.hi() < 0) return -1;
  mpz_class pos = 1, neg = 1, t;
  for (const auto& [q, c] : coeffs) {
    if (sgn(c) == 0) continue;
    mpz_class a = abs(c);
    if (!a.fits_ulong_p()) throw std::overflow_error("exponent too large for exact comparison");
    mpz_ui_pow_ui(t.get_mpz_t(), q, a.get_ui());
    (sgn(c) > 0 ? pos : neg) *= t;
  }
  return cmp(pos, neg) > 0 ? 1 : (cmp(pos, neg) < 0 ? -1 : 0);
}

mpz_class k_of(const std::vector<std::uint64_t>& sorted_primes, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > sorted_primes.size()) throw std::domain_error("k out of range");
  mpz_class r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<unsigned long>(sorted_primes[i]);
  return r;
}

Lemma31Report lemma31_part_i(const FactoredInteger& N, const std::vector<std::uint64_t>& S_in, int k) {
  std::vector<std::uint64_t> S = S_in;
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  if (S.size() < 2) throw std::domain_error("S needs at least two primes");
  if (k < 2 || static_cast<std::size_t>(k) > S.size()) throw std::domain_error("k must lie in [2, |S|]");
  for (auto p : S)
    if (!is_prime_u64(p)) throw std::domain_error("S must consist of primes");

  // k(S) > h / log 2, i.e. 2^k(S) > N
  mpz_class kS = k_of(S, k);
  Enclosure lhs = Enclosure::from_mpz(kS) * log2_enclosure();
  Enclosure h = N.h();
  bool hyp;
  if (certainly_gt(lhs, h)) hyp = true;
  else if (certainly_le(lhs, h)) hyp = false;
  else {
    if (!kS.fits_ulong_p()) throw std::overflow_error("k(S) too large for exact comparison");
    mpz_class two_k;
    mpz_ui_pow_ui(two_k.get_mpz_t(), 2, kS.get_ui());
    hyp = two_k > N.value();
  }
  if (!hyp) throw std::domain_error("hypothesis k(S) > h/log 2 fails");

  Lemma31Report r;
  // identity: both sides as exponent vectors
  std::map<std::uint64_t, std::uint64_t> left, right;
  for (auto p : S)
    if (N.v(p) > 0) left[p] = N.v(p);
  for (auto [q, e] : N.factors())
    if (std::binary_search(S.begin(), S.end(), q)) right[q] = e;
  r.identity_holds = left == right;

  // sum_{p in S} log N_p - (k-1) log N_B as an integer combination of logs
  std::map<std::uint64_t, mpz_class> c;
  for (auto [q, e] : N.factors()) {
    std::uint64_t hits = 0;
    for (auto p : S)
      if (e % p == 0) ++hits;
    if (hits == 0) continue;  // q not in B
    c[q] = mpz_class(static_cast<unsigned long>(e)) * (static_cast<long>(hits) - (k - 1));
  }
  r.inequality_holds = log_combination_sign(c) <= 0;
  return r;
}

bool lemma31_part_i_check(const FactoredInteger& N, const std::vector<std::uint64_t>& S, int k) {
  return lemma31_part_i(N, S, k).holds();
}

std::string to_string(DatasetKind k) { return k == DatasetKind::R ? "R" : "Rprime"; }

RamificationDataset make_dataset(DatasetKind k, std::uint64_t l) {
  return k == DatasetKind::R ? make_Rl(l) : make_Rl_prime(l);
}

VolTable VolTable::build(std::uint64_t l_max, DatasetKind kind, const PrimeTables& tables,
                         std::uint64_t exact_cutoff) {
  if (tables.limit() < 3 * l_max + 1) throw std::out_of_range("tables too small for the Vol table");
  VolTable vt;
  vt.l_max_ = l_max;
  vt.kind_ = kind;
  vt.policy_ = "exact<=" + std::to_string(exact_cutoff) + ",closed_form";
  for (std::uint32_t p : small_primes_upto(std::min<std::uint64_t>(l_max, 1u << 20)))
    if (p >= 11) vt.primes_.push_back(p);
  if (l_max > (1u << 20)) {
    auto more = tables.primes_in(static_cast<double>(1u << 20), static_cast<double>(l_max));
    vt.primes_.insert(vt.primes_.end(), more.begin(), more.end());
  }
  vt.vols_.assign(vt.primes_.size(), Enclosure(0.0));

  // exact values, then one pass over the primes up to 3 l_max + 1 for the closed forms
  std::size_t n_exact = 0;
  while (n_exact < vt.primes_.size() && vt.primes_[n_exact] <= exact_cutoff) ++n_exact;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_exact); ++i)
    vt.vols_[i] = effabc::vol(make_dataset(kind, vt.primes_[i]), VolMethod::exact).value;

  constexpr std::size_t kBatch = 1 << 15;
  std::vector<PrimeSums> at;
  std::size_t next = n_exact, batch_start = n_exact;
  auto flush = [&] {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(at.size()); ++i)
      vt.vols_[batch_start + i] = vol_closed_form(make_dataset(kind, vt.primes_[batch_start + i]), at[i]).value;
    batch_start = next;
    at.clear();
  };
  // queries at 3l + 1 ascend with l; each sees exactly the primes up to it
  PrimeSums running;
  auto take_queries_below = [&](std::uint64_t bound) {
    while (next < vt.primes_.size() && 3 * vt.primes_[next] + 1 < bound) {
      at.push_back(running);
      ++next;
      if (at.size() == kBatch) flush();
    }
  };
  if (next < vt.primes_.size()) {
    tables.for_each_prime(0, 3 * l_max + 1, [&](std::uint64_t p) {
      take_queries_below(p);
      running.add_prime(p);
    });
    take_queries_below(std::numeric_limits<std::uint64_t>::max());
    flush();
  }
  vt.finish();
  return vt;
}

VolTable VolTable::from_function(std::uint64_t l_max, DatasetKind kind, std::string policy,
                                 const std::function<Enclosure(std::uint64_t)>& vol) {
  VolTable vt;
  vt.l_max_ = l_max;
  vt.kind_ = kind;
  vt.policy_ = std::move(policy);
  for (std::uint32_t p : small_primes_upto(l_max))
    if (p >= 11) vt.primes_.push_back(p);
  for (auto p : vt.primes_) vt.vols_.push_back(vol(p));
  vt.finish();
  return vt;
}

void VolTable::finish() {
  const std::size_t n = primes_.size();
  for (auto* v : {&a1_lo_, &a1_hi_, &vol_lo_, &vol_hi_, &log_lo_, &log_hi_}) v->assign(n + 1, 0.0);
  CompensatedSum a_lo, a_hi, v_lo, v_hi, g_lo, g_hi;
  for (std::size_t i = 0; i < n; ++i) {
    Enclosure a = a1_term(primes_[i]), g = log_u64(primes_[i]);
    a_lo.add(a.lo());
    a_hi.add(a.hi());
    v_lo.add(vols_[i].lo());
    v_hi.add(vols_[i].hi());
    g_lo.add(g.lo());
    g_hi.add(g.hi());
    a1_lo_[i + 1] = a_lo.enclosure().lo();
    a1_hi_[i + 1] = a_hi.enclosure().hi();
    vol_lo_[i + 1] = v_lo.enclosure().lo();
    vol_hi_[i + 1] = v_hi.enclosure().hi();
    log_lo_[i + 1] = g_lo.enclosure().lo();
    log_hi_[i + 1] = g_hi.enclosure().hi();
  }
}

std::size_t VolTable::index_above(std::uint64_t x) const {
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

Enclosure VolTable::vol(std::uint64_t l) const {
  auto it = std::lower_bound(primes_.begin(), primes_.end(), l);
  if (it == primes_.end() || *it != l) throw std::out_of_range("no Vol value for " + std::to_string(l));
  return vols_[it - primes_.begin()];
}

VolTable::Sums VolTable::window_sums(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint64_t>& excluded) const {
  if (hi > l_max_) throw std::out_of_range("window beyond Vol table");
  std::size_t i = index_above(lo), j = index_above(hi);
  if (j < i) j = i;
  auto diff = [&](const std::vector<double>& L, const std::vector<double>& H) {
    return Enclosure(std::max(0.0, step_down(L[j] - H[i], 1)), step_up(H[j] - L[i], 1));
  };
  Sums s{j - i, diff(a1_lo_, a1_hi_), diff(vol_lo_, vol_hi_), diff(log_lo_, log_hi_)};
  for (auto x : excluded) {
    auto it = std::lower_bound(primes_.begin() + i, primes_.begin() + j, x);
    if (it == primes_.begin() + j || *it != x) continue;
    --s.n;
    s.a1_sum = s.a1_sum - a1_term(x);
    s.vol_sum = s.vol_sum - vols_[it - primes_.begin()];
    s.log_sum = s.log_sum - log_u64(x);
  }
  return s;
}

PrimeWindow make_window(const VolTable& vt, std::uint64_t window_lo, std::uint64_t window_hi, bool allow_13) {
  PrimeWindow w;
  w.window_lo = window_lo;
  w.window_hi = window_hi;
  if (!allow_13 && window_lo < 13 && window_hi >= 13) w.excluded = {13};
  std::size_t i = vt.index_above(window_lo), j = vt.index_above(window_hi);
  w.n = j > i ? j - i - w.excluded.size() : 0;
  return w;
}

std::vector<std::uint64_t> window_primes(const VolTable& vt, const PrimeWindow& S) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = vt.index_above(S.window_lo); i < vt.primes().size() && vt.primes()[i] <= S.window_hi; ++i) {
    std::uint64_t p = vt.primes()[i];
    if (std::find(S.excluded.begin(), S.excluded.end(), p) == S.excluded.end()) out.push_back(p);
  }
  return out;
}

CombinerParams window_params(const VolTable& vt, const PrimeWindow& S, int k) {
  auto s = vt.window_sums(S.window_lo, S.window_hi, S.excluded);
  if (s.n != S.n) throw std::invalid_argument("window size does not match its primes");
  if (s.n < 2 || k < 2 || static_cast<std::uint64_t>(k) > s.n) throw std::domain_error("need 2 <= k <= |S|");
  CombinerParams p;
  p.S = S;
  p.k = k;
  Enclosure n = Enclosure::from_uint(s.n);
  p.a1 = s.a1_sum / n;
  p.a2 = 3.0 * s.vol_sum / n;
  p.a3 = s.log_sum;
  std::vector<std::uint64_t> first;
  for (std::size_t i = vt.index_above(S.window_lo); first.size() < static_cast<std::size_t>(k); ++i) {
    std::uint64_t q = vt.primes()[i];
    if (std::find(S.excluded.begin(), S.excluded.end(), q) == S.excluded.end()) first.push_back(q);
  }
  p.p0 = first.front();
  p.k_S = k_of(first, k);
  return p;
}

CombinerParams direct_params(const std::vector<std::uint64_t>& S_in, int k,
                             const std::function<Enclosure(std::uint64_t)>& vol) {
  std::vector<std::uint64_t> S = S_in;
  std::sort(S.begin(), S.end());
  if (S.size() < 2 || k < 2 || static_cast<std::size_t>(k) > S.size()) throw std::domain_error("need 2 <= k <= |S|");
  for (auto l : S)
    if (l < 11 || !is_prime_u64(l)) throw std::domain_error("S must consist of primes >= 11");
  Enclosure a1(0.0), v(0.0), a3(0.0);
  for (auto l : S) {
    a1 += a1_term(l);
    v += vol(l);
    a3 += log_u64(l);
  }
  CombinerParams p;
  p.S.window_lo = S.front() - 1;
  p.S.window_hi = S.back();
  p.S.n = S.size();
  if (std::binary_search(S.begin(), S.end(), 13) == false && S.front() < 13 && S.back() > 13) p.S.excluded = {13};
  p.k = k;
  Enclosure n = Enclosure::from_uint(S.size());
  p.a1 = a1 / n;
  p.a2 = 3.0 * v / n;
  p.a3 = a3;
  p.p0 = S.front();
  p.k_S = k_of(S, k);
  return p;
}

Enclosure combiner_bound(const CombinerParams& p, const Enclosure& h, const Enclosure& rad_log) {
  return (3.0 + p.a1) * rad_log + p.a2 + Enclosure::from_uint(p.k) * h / Enclosure::from_uint(p.n());
}

Enclosure abc_margin(const CombinerParams& p, const Enclosure& h) {
  Enclosure kn = Enclosure::from_uint(p.k) / Enclosure::from_uint(p.n());
  // h - 3 log rad N <= (h (a1 + 3k/n) + 3 a2) / (3 + a1) once log rad N is eliminated
  Enclosure bound = (h * (p.a1 + 3.0 * kn) + 3.0 * p.a2) / (3.0 + p.a1);
  return bound + 4.0 * log2_enclosure() - 8.0 * sqrt(h * log(h));
}

Enclosure abc_loose_margin(const CombinerParams& p, const Enclosure& h) {
  Enclosure kn = Enclosure::from_uint(p.k) / Enclosure::from_uint(p.n());
  return p.a1 * h + p.a2 + kn * h - 8.0 * sqrt(h * log(h)) + 4.0 * log2_enclosure();
}

double e31() { return exp(Enclosure(31.0)).hi(); }

namespace {

constexpr double kBetaMin = 2.0 / 3.0;
constexpr double kBetaMax = 1.0;
constexpr int kBetaSteps = 16;

double window_top(double h, double beta) { return beta * std::sqrt(h * std::log(h)); }

bool k_condition(const CombinerParams& p, double h_hi) {
  return certainly_gt(Enclosure::from_mpz(p.k_S) * log2_enclosure(), Enclosure(h_hi));
}

std::optional<ExclusionCertificate> cover(double h_a, double h_b, double step_ratio, const VolTable& vt) {
  const double ln2 = std::log(2.0);
  // smallest admissible start whose k(S) exceeds h_b/log 2
  auto start = static_cast<std::uint64_t>(std::floor(std::sqrt(h_b / ln2)));
  start = std::max<std::uint64_t>(start, 10);
  for (int b = 0; b <= kBetaSteps; ++b) {
    double beta = kBetaMin + (kBetaMax - kBetaMin) * b / kBetaSteps;
    auto top = static_cast<std::uint64_t>(std::floor(window_top(h_b, beta)));
    if (top > vt.l_max()) break;
    std::uint64_t lo = start;
    PrimeWindow w;
    CombinerParams p;
    bool ok = false;
    while (true) {
      w = make_window(vt, lo, top, false);
      if (w.n < 3) break;
      p = window_params(vt, w, 2);
      if (k_condition(p, h_b)) {
        ok = true;
        break;
      }
      lo = p.p0;
    }
    if (!ok) continue;
    Enclosure ma = abc_margin(p, Enclosure(h_a)), mb = abc_margin(p, Enclosure(h_b));
    if (!(ma.hi() < 0 && mb.hi() < 0)) continue;
    ExclusionCertificate c;
    c.check_kind = CheckKind::abc_sweep;
    c.S = w;
    c.k = 2;
    c.dataset = to_string(vt.kind());
    c.vol_policy = vt.policy();
    c.a1 = p.a1;
    c.a2 = p.a2;
    c.a3 = p.a3;
    c.k_s = p.k_S.get_str();
    c.k_s_log2 = Enclosure::from_mpz(p.k_S) * log2_enclosure();
    c.h_lo = h_a;
    c.h_hi = h_b;
    c.step_ratio = step_ratio;
    c.margin_lo = ma;
    c.margin_hi = mb;
    c.loose_margin_lo = abc_loose_margin(p, Enclosure(h_a));
    c.loose_margin_hi = abc_loose_margin(p, Enclosure(h_b));
    return c;
  }
  return std::nullopt;
}

void cover_recursive(double h_a, double h_b, double step_ratio, const VolTable& vt, int depth,
                     std::vector<ExclusionCertificate>& out) {
  if (auto c = cover(h_a, h_b, step_ratio, vt)) {
    out.push_back(*c);
    return;
  }
  if (depth >= 12) throw UncoverableIntervalError("no admissible S certifies [" + std::to_string(h_a) + ", " +
                                                      std::to_string(h_b) + "]", h_a);
  double mid = std::sqrt(h_a * h_b);
  cover_recursive(h_a, mid, step_ratio, vt, depth + 1, out);
  cover_recursive(mid, h_b, step_ratio, vt, depth + 1, out);
}

}  // namespace

std::uint64_t sweep_l_max(double h_hi) { return static_cast<std::uint64_t>(std::floor(window_top(h_hi, kBetaMax))) + 1; }

std::vector<ExclusionCertificate> read_certificates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<ExclusionCertificate> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    if (j.value("kind", "") != "exclusion") continue;
    if (j.value("schema", "") != kSchemaVersion) throw std::runtime_error("unknown certificate schema");
    out.push_back(j.get<ExclusionCertificate>());
  }
  return out;
}

std::vector<ExclusionCertificate> sweep_abc(const SweepOptions& opt, const VolTable& vt) {
  const double h_hi = opt.h_hi > 0 ? opt.h_hi : e31();
  if (!(opt.step_ratio > 1)) throw std::domain_error("step ratio must exceed 1");
  if (!(opt.h_lo >= 16 && opt.h_lo < h_hi)) throw std::domain_error("bad h range");
  if (sweep_l_max(h_hi) > vt.l_max() + 1) throw std::out_of_range("Vol table too small for this sweep");

  std::vector<ExclusionCertificate> done;
  double h = opt.h_lo;
  if (opt.resume && !opt.out.empty() && std::filesystem::exists(opt.out)) {
    for (auto& c : read_certificates(opt.out)) {
      if (c.check_kind != CheckKind::abc_sweep) continue;
      auto r = recheck(c, vt);
      if (!r.ok) throw std::runtime_error("resumed certificate fails recheck: " + r.reason);
      if (c.h_lo > h) throw std::runtime_error("resumed certificates leave a gap at h = " + std::to_string(h));
      if (c.h_hi > h) h = c.h_hi;
      done.push_back(std::move(c));
    }
    if (opt.progress) opt.progress("resumed " + std::to_string(done.size()) + " certificates up to h = " + std::to_string(h));
  }

  std::vector<double> grid{h};
  while (grid.back() < h_hi) grid.push_back(std::min(h_hi, grid.back() * opt.step_ratio));
  const std::size_t m = grid.size() - 1;
  std::vector<std::vector<ExclusionCertificate>> parts(m);
  std::vector<std::string> errors(m);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    try {
      cover_recursive(grid[i], grid[i + 1], opt.step_ratio, vt, 0, parts[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    if (!errors[i].empty()) throw UncoverableIntervalError(errors[i], grid[i]);

  std::ofstream out;
  if (!opt.out.empty()) {
    out.open(opt.out, opt.resume ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + opt.out.string());
  }
  for (auto& part : parts)
    for (auto& c : part) {
      if (out) out << nlohmann::json(c).dump() << '\n';
      done.push_back(std::move(c));
    }
  if (opt.progress) opt.progress("covered [" + std::to_string(opt.h_lo) + ", " + std::to_string(h_hi) + "] with " +
                                 std::to_string(done.size()) + " intervals");
  return done;
}

RecheckResult recheck(const ExclusionCertificate& c, const VolTable& vt) {
  if (c.check_kind != CheckKind::abc_sweep) return {false, "not an abc sweep certificate"};
  if (c.dataset != to_string(vt.kind())) return {false, "dataset mismatch"};
  if (c.vol_policy != vt.policy()) return {false, "Vol policy mismatch"};
  if (c.S.window_hi > vt.l_max()) return {false, "Vol table does not reach the window"};
  if (c.k != 2) return {false, "sweep certificates use k = 2"};
  for (auto x : c.S.excluded)
    if (x != 13) return {false, "unexpected exclusion"};
  auto primes = window_primes(vt, c.S);
  for (auto p : primes)
    if (p == 13) return {false, "13 in S"};
  if (primes.size() != c.S.n) return {false, "window size mismatch"};
  CombinerParams p = direct_params(primes, c.k, [&](std::uint64_t l) { return vt.vol(l); });
  if (p.k_S.get_str() != c.k_s) return {false, "k(S) mismatch"};
  if (!c.a1.overlaps(p.a1) || !c.a2.overlaps(p.a2) || !c.a3.overlaps(p.a3)) return {false, "a1/a2/a3 mismatch"};
  if (!k_condition(p, c.h_hi)) return {false, "k(S) log 2 does not exceed h_hi"};
  if (!(c.h_lo < c.h_hi)) return {false, "empty interval"};
  Enclosure ma = abc_margin(p, Enclosure(c.h_lo)), mb = abc_margin(p, Enclosure(c.h_hi));
  if (!(ma.hi() < 0 && mb.hi() < 0)) return {false, "margin not decisively negative"};
  if (!ma.overlaps(c.margin_lo) || !mb.overlaps(c.margin_hi)) return {false, "recorded margins not reproduced"};
  return {true, ""};
}

RecheckResult check_coverage(const std::vector<ExclusionCertificate>& certs, double h_lo, double h_hi) {
  std::vector<std::pair<double, double>> iv;
  for (const auto& c : certs)
    if (c.check_kind == CheckKind::abc_sweep) iv.emplace_back(c.h_lo, c.h_hi);
  std::sort(iv.begin(), iv.end());
  double reach = h_lo;
  for (auto [a, b] : iv) {
    if (a > reach) return {false, "gap at h = " + std::to_string(reach)};
    reach = std::max(reach, b);
  }
  if (reach < h_hi) return {false, "coverage stops at h = " + std::to_string(reach)};
  return {true, ""};
}

Enclosure height_constant_f(const Enclosure& x) {
  Enclosure h0 = 400.0 * x * x * log(x);
  Enclosure u0 = 64.0 * (1.0 + x) * (1.0 + x);
  return log(h0) - log(log(h0)) - log(u0);
}

Enclosure height_constant_fprime(const Enclosure& x) {
  Enclosure lx = log(x);
  Enclosure lh0 = log(400.0 * x * x * lx);
  return 2.0 / (x * (x + 1.0)) + (log(400.0 * lx) - 1.0) / (x * lx * lh0);
}

HeightConstantValues height_constant_values(std::size_t grid_points) {
  HeightConstantValues v;
  v.f10 = height_constant_f(Enclosure(10.0));
  v.min_derivative = Enclosure(std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i <= grid_points; ++i) {
    double x = 10.0 * std::pow(1e5, static_cast<double>(i) / grid_points);
    Enclosure d = height_constant_fprime(Enclosure(x));
    if (d.lo() < v.min_derivative.lo()) {
      v.min_derivative = d;
      v.min_derivative_at = x;
    }
  }
  // eps = 1/10: u0 = 64 (1 + 1/eps)^2 is a perfect square and 1 - 8/sqrt(u0) = 1/(1 + eps)
  const mpq_class eps(1, 10);
  mpq_class inv = 1 / eps;
  mpq_class u0 = 64 * (1 + inv) * (1 + inv);
  u0.canonicalize();
  mpz_class root;
  bool square = u0.get_den() == 1 && mpz_perfect_square_p(u0.get_num_mpz_t());
  if (square) mpz_sqrt(root.get_mpz_t(), u0.get_num_mpz_t());
  v.identity_exact = square && mpq_class(1) - mpq_class(8, 1) / mpq_class(root) == 1 / (1 + eps);
  return v;
}

SweepCertificate height_constant_check() {
  auto t0 = Clock::now();
  HeightConstantValues v = height_constant_values();
  SweepCertificate c;
  c.kind = "height_constants";
  c.range_lo = 10;
  c.range_hi = 1e6;
  c.grid = "4001 log-spaced points for f'";
  c.worst_margin = v.f10;
  c.worst_at = 10;
  c.passed = v.f10.lo() > 0 && v.min_derivative.lo() > 0 && v.identity_exact;
  c.details = {{"f10", enclosure_json(v.f10)},
               {"f10_width", v.f10.width()},
               {"min_fprime", enclosure_json(v.min_derivative)},
               {"min_fprime_at", v.min_derivative_at},
               {"u0_identity_exact", v.identity_exact},
               {"u0_at_eps_0.1", 7744}};
  c.duration_ms = ms_since(t0);
  if (!c.passed && v.identity_exact && (v.f10.hi() > 0 || v.min_derivative.hi() > 0))
    throw IndecisiveError("height constants not decisive", 10, Enclosure(0.0), v.f10);
  return c;
}

}  // namespace effabc
