#include "effabc/prime_tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

#include <mpfr.h>
#include <omp.h>

namespace effabc {

namespace {

constexpr char kMagic[6] = {'A', 'B', 'C', 'P', 'T', '1'};

double log_term(std::uint64_t p) {
  if (precision_tier() == PrecisionTier::extended) {
    mpfr_t a;
    mpfr_init2(a, 53);
    mpfr_set_ui(a, static_cast<unsigned long>(p), MPFR_RNDN);
    mpfr_log(a, a, MPFR_RNDN);
    double out = mpfr_get_d(a, MPFR_RNDN);
    mpfr_clear(a);
    return out;
  }
  return std::log(static_cast<double>(p));
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("truncated prime table cache");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_sum(std::ostream& out, const CompensatedSum& s) {
  put_u64(out, std::bit_cast<std::uint64_t>(s.hi));
  put_u64(out, std::bit_cast<std::uint64_t>(s.lo));
  put_u64(out, std::bit_cast<std::uint64_t>(s.lo_max));
  put_u64(out, s.ops);
}

CompensatedSum get_sum(std::istream& in) {
  CompensatedSum s;
  s.hi = std::bit_cast<double>(get_u64(in));
  s.lo = std::bit_cast<double>(get_u64(in));
  s.lo_max = std::bit_cast<double>(get_u64(in));
  s.ops = get_u64(in);
  return s;
}

}  // namespace

Enclosure CompensatedSum::enclosure() const {
  double v = hi + lo;
  // term errors + accumulated lo roundings + final hi+lo rounding, rounded up generously
  double err = std::fabs(v) * (kTermRelErr + 0x1p-52) + static_cast<double>(ops) * lo_max * 0x1p-52;
  err = err * (1 + 0x1p-20) + std::numeric_limits<double>::denorm_min();
  return Enclosure(std::max(0.0, next_down(v - err)), next_up(v + err));
}

void PrimeSums::add_prime(std::uint64_t p) {
  double lp = log_term(p);
  auto pd = static_cast<double>(p);
  ++pi;
  sum_p += p;
  theta.add(lp);
  plogp.add(pd * lp);
  logp_pm1.add(lp / (pd - 1.0));
}

void PrimeSums::merge(const PrimeSums& o) {
  pi += o.pi;
  sum_p += o.sum_p;
  theta.merge(o.theta);
  plogp.merge(o.plogp);
  logp_pm1.merge(o.logp_pm1);
}

std::vector<std::uint32_t> small_primes_upto(std::uint64_t n) {
  std::vector<std::uint32_t> out;
  if (n < 2) return out;
  std::vector<std::uint8_t> comp(n + 1, 0);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = 1;
  }
  return out;
}

void sieve_segment(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint32_t> base_primes,
                   std::vector<std::uint8_t>& is_prime) {
  is_prime.assign(hi > lo ? hi - lo : 0, 1);
  if (hi <= lo) return;
  for (std::uint64_t n = lo; n < std::min<std::uint64_t>(hi, 2); ++n) is_prime[n - lo] = 0;
  for (std::uint32_t p32 : base_primes) {
    std::uint64_t p = p32;
    if (p * p >= hi) break;
    std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
    for (std::uint64_t m = start; m < hi; m += p) is_prime[m - lo] = 0;
  }
}

void PrimeTables::init_base(std::uint64_t limit, std::uint64_t stride) {
  if (limit < 2 || limit > kMaxLimit)
    throw CapacityError("prime table limit " + std::to_string(limit) + " outside [2, 2^32]");
  if (stride < 64) throw std::invalid_argument("checkpoint stride too small");
  limit_ = limit;
  stride_ = stride;
  base_primes_ = small_primes_upto(isqrt(limit) + 1);
}

PrimeSums PrimeTables::block_sums(std::uint64_t block) const {
  std::uint64_t lo = block * stride_;
  std::uint64_t hi = std::min(lo + stride_, limit_ + 1);
  PrimeSums s;
  if (lo >= hi) return s;
  std::vector<std::uint8_t> mark;
  sieve_segment(lo, hi, base_primes_, mark);
  for (std::uint64_t i = 0; i < mark.size(); ++i)
    if (mark[i]) s.add_prime(lo + i);
  return s;
}

PrimeTables PrimeTables::build_impl(std::uint64_t limit, std::uint64_t stride, bool parallel) {
  PrimeTables t;
  t.init_base(limit, stride);
  const std::uint64_t blocks = limit / stride + 1;
  std::vector<PrimeSums> local(blocks);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) local[b] = t.block_sums(b);
  } else {
    for (std::uint64_t b = 0; b < blocks; ++b) local[b] = t.block_sums(b);
  }
  // serial prefix in block order keeps the checkpoints bit-identical for any team size
  t.checkpoints_.resize(blocks + 1);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    t.checkpoints_[b + 1] = t.checkpoints_[b];
    t.checkpoints_[b + 1].merge(local[b]);
  }
  return t;
}

PrimeTables PrimeTables::build(std::uint64_t limit, std::uint64_t stride) {
  return build_impl(limit, stride, true);
}

PrimeTables PrimeTables::build_serial(std::uint64_t limit, std::uint64_t stride) {
  return build_impl(limit, stride, false);
}

std::uint64_t PrimeTables::checked_cutoff(double x) const {
  if (std::isnan(x)) throw std::invalid_argument("NaN cutoff");
  if (x > static_cast<double>(limit_))
    throw std::out_of_range("cutoff " + std::to_string(x) + " beyond table limit " + std::to_string(limit_));
  if (x < 2) return 0;
  return static_cast<std::uint64_t>(std::floor(x));
}

PrimeSums PrimeTables::sums_at(std::uint64_t x) const {
  if (x > limit_) throw std::out_of_range("cutoff beyond table limit");
  std::uint64_t b = x / stride_;
  PrimeSums s = checkpoints_.at(b);
  std::uint64_t lo = b * stride_;
  std::vector<std::uint8_t> mark;
  sieve_segment(lo, x + 1, base_primes_, mark);
  for (std::uint64_t i = 0; i < mark.size(); ++i)
    if (mark[i]) s.add_prime(lo + i);
  return s;
}

Enclosure PrimeTables::theta(double x) const { return sums_at(checked_cutoff(x)).theta.enclosure(); }
std::uint64_t PrimeTables::prime_pi(double x) const { return sums_at(checked_cutoff(x)).pi; }
Enclosure PrimeTables::sum_plogp(double x) const { return sums_at(checked_cutoff(x)).plogp.enclosure(); }
Enclosure PrimeTables::sum_logp_over_pm1(double x) const {
  return sums_at(checked_cutoff(x)).logp_pm1.enclosure();
}
unsigned __int128 PrimeTables::sum_primes(double x) const { return sums_at(checked_cutoff(x)).sum_p; }

void PrimeTables::for_each_prime(std::uint64_t lo, std::uint64_t hi,
                                 const std::function<void(std::uint64_t)>& f) const {
  if (hi > limit_) throw std::out_of_range("prime range beyond table limit");
  std::vector<std::uint8_t> mark;
  for (std::uint64_t a = lo + 1; a <= hi;) {
    std::uint64_t b = std::min(hi + 1, (a / stride_ + 1) * stride_);
    sieve_segment(a, b, base_primes_, mark);
    for (std::uint64_t i = 0; i < mark.size(); ++i)
      if (mark[i]) f(a + i);
    a = b;
  }
}

std::vector<std::uint64_t> PrimeTables::primes_in(double lo, double hi) const {
  std::vector<std::uint64_t> out;
  std::uint64_t h = checked_cutoff(hi);
  if (lo >= hi || h < 2) return out;
  std::uint64_t l = lo < 0 ? 0 : static_cast<std::uint64_t>(std::floor(lo));
  for_each_prime(l, h, [&](std::uint64_t p) { out.push_back(p); });
  return out;
}

void PrimeTables::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put_u64(out, limit_);
  put_u64(out, stride_);
  put_u64(out, checkpoints_.size());
  for (const auto& c : checkpoints_) {
    put_u64(out, c.pi);
    put_u64(out, static_cast<std::uint64_t>(c.sum_p));
    put_u64(out, static_cast<std::uint64_t>(c.sum_p >> 64));
    put_sum(out, c.theta);
    put_sum(out, c.plogp);
    put_sum(out, c.logp_pm1);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

PrimeTables PrimeTables::load(const std::filesystem::path& path, double verify_fraction, std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0) throw std::runtime_error("bad prime table magic in " + path.string());
  PrimeTables t;
  std::uint64_t limit = get_u64(in);
  std::uint64_t stride = get_u64(in);
  t.init_base(limit, stride);
  std::uint64_t count = get_u64(in);
  if (count != limit / stride + 2) throw std::runtime_error("checkpoint count mismatch in " + path.string());
  t.checkpoints_.resize(count);
  for (auto& c : t.checkpoints_) {
    c.pi = get_u64(in);
    std::uint64_t lo = get_u64(in), hi = get_u64(in);
    c.sum_p = (static_cast<unsigned __int128>(hi) << 64) | lo;
    c.theta = get_sum(in);
    c.plogp = get_sum(in);
    c.logp_pm1 = get_sum(in);
  }
  std::mt19937_64 rng(seed);
  const std::uint64_t blocks = count - 1;
  auto checks = static_cast<std::uint64_t>(std::ceil(verify_fraction * static_cast<double>(blocks)));
  const bool all = checks >= blocks;  // sampling with replacement would miss blocks
  for (std::uint64_t i = 0; i < (all ? blocks : checks); ++i) {
    std::uint64_t b = all ? i : rng() % blocks;
    PrimeSums expect = t.checkpoints_[b];
    expect.merge(t.block_sums(b));
    if (!(expect == t.checkpoints_[b + 1]))
      throw std::runtime_error("prime table cache failed re-verification at block " + std::to_string(b));
  }
  return t;
}

const SmallPrimeLogs& SmallPrimeLogs::get() {
  static const SmallPrimeLogs table = [] {
    SmallPrimeLogs t;
    t.primes = small_primes_upto(1u << 20);
    t.lo_prefix.assign(1, 0.0);
    t.hi_prefix.assign(1, 0.0);
    for (std::uint32_t p : t.primes) {
      Enclosure l = p == 2 ? Enclosure(0.0) : log_of(p - 1.0);
      t.lo_prefix.push_back(next_down(t.lo_prefix.back() + l.lo()));
      t.hi_prefix.push_back(next_up(t.hi_prefix.back() + l.hi()));
    }
    return t;
  }();
  return table;
}

std::size_t SmallPrimeLogs::count_below_sqrt_plus_one(double x) const {
  // (p - 1)^2 is exact in double for these p
  auto it = std::partition_point(primes.begin(), primes.end(), [x](std::uint32_t p) {
    double q = p - 1.0;
    return q * q < x;
  });
  if (it == primes.end()) throw std::out_of_range("small prime table too short");
  return static_cast<std::size_t>(it - primes.begin());
}

std::size_t SmallPrimeLogs::count_pp1_below(std::uint64_t e) const {
  auto it = std::partition_point(primes.begin(), primes.end(), [e](std::uint32_t p) {
    return static_cast<std::uint64_t>(p) * (p - 1) < e;
  });
  if (it == primes.end()) throw std::out_of_range("small prime table too short");
  return static_cast<std::size_t>(it - primes.begin());
}

PrimeTables PrimeTables::cached(const std::filesystem::path& dir, std::uint64_t limit) {
  namespace fs = std::filesystem;
  if (dir.empty()) return build(limit);
  std::error_code ec;
  fs::create_directories(dir, ec);
  fs::path best;
  std::uint64_t best_limit = 0;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    auto name = entry.path().filename().string();
    if (name.rfind("primes_", 0) != 0 || entry.path().extension() != ".abcpt") continue;
    std::uint64_t l = std::stoull(name.substr(7));
    if (l >= limit && (best.empty() || l < best_limit)) {
      best = entry.path();
      best_limit = l;
    }
  }
  if (!best.empty()) return load(best);
  PrimeTables t = build(limit);
  t.save(dir / ("primes_" + std::to_string(limit) + ".abcpt"));
  return t;
}

}  // namespace effabc
