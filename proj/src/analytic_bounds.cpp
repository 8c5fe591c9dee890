#include "effabc/analytic_bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

namespace effabc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Enclosure small_prime_term(double x) {
  const auto& sp = SmallPrimeLogs::get();
  std::size_t c = sp.count_below_sqrt_plus_one(x);
  return Enclosure::from_uint(c) * log_of(x) - sp.sum_log_pm1(c);
}

Enclosure absval(const Enclosure& e) {
  if (e.lo() >= 0) return e;
  if (e.hi() <= 0) return -e;
  return Enclosure(0.0, std::max(-e.lo(), e.hi()));
}

}  // namespace

Enclosure f1(double x, const PrimeTables& tables) {
  if (!(x > 3)) throw std::domain_error("f1 needs x > 3");
  if (x > static_cast<double>(tables.limit())) throw std::out_of_range("tables too small for f1");
  PrimeSums s = tables.sums_at(static_cast<std::uint64_t>(std::floor(x)));
  Enclosure theta = s.theta.enclosure();
  Enclosure X(x);
  return s.logp_pm1.enclosure() + theta + (theta - s.plogp.enclosure()) / X + small_prime_term(x);
}

Enclosure f2(double x, const PrimeTables& tables) {
  if (!(x >= 5)) throw std::domain_error("f2 needs x >= 5");
  if (3 * x > static_cast<double>(tables.limit())) throw std::out_of_range("tables too small for f2");
  Enclosure X(x);
  Enclosure pref = (X * X + 5.0 * X) / (X * X + X - 12.0);
  return pref * (f1(3 * x, tables) + Enclosure(10.0) / 3.0 * log(X) + 9.0);
}

Enclosure f1_target(double n) {
  Enclosure N(n);
  return N * (0.5 + AnalyticConstants::f1_fringe() / log(N));
}

Enclosure f2_target(double n) {
  Enclosure N(n);
  return N * (1.5 + AnalyticConstants::f2_fringe() / log(N));
}

F1Incremental::F1Incremental(const PrimeTables& tables, std::uint64_t n_start)
    : tables_(&tables), n_(n_start) {
  if (n_start < 4) throw std::domain_error("f1 needs x > 3");
  sums_ = tables.sums_at(n_start);
  segment_end_ = n_start;
  small_count_ = SmallPrimeLogs::get().count_below_sqrt_plus_one(static_cast<double>(n_start));
  refresh();
}

void F1Incremental::refresh() {
  s1_ = sums_.logp_pm1.enclosure();
  theta_ = sums_.theta.enclosure();
  theta_minus_p_ = theta_ - sums_.plogp.enclosure();
}

void F1Incremental::absorb(std::uint64_t p) {
  sums_.add_prime(p);
  refresh();
}

Enclosure F1Incremental::value() const {
  auto x = static_cast<double>(n_);
  Enclosure X(x);
  const auto& sp = SmallPrimeLogs::get();
  return s1_ + theta_ + theta_minus_p_ / X + Enclosure::from_uint(small_count_) * log(X) -
         sp.sum_log_pm1(small_count_);
}

void F1Incremental::advance() {
  ++n_;
  if (n_ > segment_end_) {
    std::uint64_t end = std::min(tables_->limit(), n_ - 1 + tables_->stride());
    if (n_ > end) throw std::out_of_range("f1 sweep beyond table limit");
    pending_ = tables_->primes_in(static_cast<double>(n_ - 1), static_cast<double>(end));
    pending_pos_ = 0;
    segment_end_ = end;
  }
  if (pending_pos_ < pending_.size() && pending_[pending_pos_] == n_) {
    absorb(n_);
    ++pending_pos_;
  }
  const auto& primes = SmallPrimeLogs::get().primes;
  while (true) {
    double q = primes[small_count_] - 1.0;
    if (q * q < static_cast<double>(n_)) ++small_count_;
    else break;
  }
}

SweepCertificate sweep_f1(std::uint64_t n_lo, std::uint64_t n_hi, const PrimeTables& tables, std::uint64_t chunk) {
  if (n_lo < 4 || n_hi < n_lo) throw std::domain_error("bad f1 sweep range");
  if (n_hi > tables.limit()) throw std::out_of_range("tables too small for f1 sweep");
  auto t0 = Clock::now();
  const std::uint64_t chunks = (n_hi - n_lo) / chunk + 1;

  struct ChunkResult {
    Enclosure worst{std::numeric_limits<double>::infinity()};
    std::uint64_t worst_at = 0;
    std::optional<std::uint64_t> bad_at;
    Enclosure bad_f1, bad_target;
    bool decisive_fail = false;
  };
  std::vector<ChunkResult> results(chunks);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    ChunkResult& r = results[c];
    std::uint64_t a = n_lo + c * chunk;
    std::uint64_t b = std::min(n_hi, a + chunk - 1);
    F1Incremental inc(tables, a);
    for (std::uint64_t n = a;; ++n) {
      Enclosure v = inc.value();
      Enclosure target = f1_target(static_cast<double>(n));
      if (!(v.hi() < target.lo())) {
        r.bad_at = n;
        r.bad_f1 = v;
        r.bad_target = target;
        r.decisive_fail = v.lo() >= target.hi();
        break;
      }
      Enclosure margin = target - v;
      if (margin.lo() < r.worst.lo()) {
        r.worst = margin;
        r.worst_at = n;
      }
      if (n == b) break;
      inc.advance();
    }
  }

  SweepCertificate cert;
  cert.kind = "f1_sweep";
  cert.range_lo = static_cast<double>(n_lo);
  cert.range_hi = static_cast<double>(n_hi);
  cert.grid = "every integer";
  cert.tables_limit = tables.limit();
  cert.worst_margin = Enclosure(std::numeric_limits<double>::infinity());
  for (const auto& r : results) {
    if (r.bad_at) {
      if (!r.decisive_fail)
        throw IndecisiveError("f1 sweep indecisive at n = " + std::to_string(*r.bad_at),
                              static_cast<double>(*r.bad_at), r.bad_f1, r.bad_target);
      cert.passed = false;
      cert.worst_at = static_cast<double>(*r.bad_at);
      cert.worst_margin = r.bad_target - r.bad_f1;
      cert.details = {{"counterexample_n", *r.bad_at}};
      cert.duration_ms = ms_since(t0);
      return cert;
    }
    if (r.worst.lo() < cert.worst_margin.lo()) {
      cert.worst_margin = r.worst;
      cert.worst_at = static_cast<double>(r.worst_at);
    }
  }
  cert.passed = true;
  cert.details = {{"claim", "f1(n) < n/2 + 0.01865 n/log n"}, {"chunk", chunk}};
  cert.duration_ms = ms_since(t0);
  return cert;
}

std::uint64_t f3_f4_required_limit(const Enclosure& x) {
  Enclosure upper = Enclosure(2.0) / 3.0 * sqrt(x * log(x));
  return static_cast<std::uint64_t>(std::floor(upper.hi())) + 1;
}

F3F4Result f3_f4_values(const Enclosure& x, const PrimeTables& tables) {
  if (x.lo() < 2) throw std::domain_error("f3/f4 need x >= 2");
  Enclosure lx = log(x);
  Enclosure lower = sqrt(x / log2_enclosure());
  Enclosure upper = Enclosure(2.0) / 3.0 * sqrt(x * lx);
  if (upper.hi() >= static_cast<double>(tables.limit())) throw std::out_of_range("tables too small for S_x");
  auto fl = [](double v) { return static_cast<std::uint64_t>(std::floor(v)); };
  PrimeSums in_lo = tables.sums_at(fl(lower.hi())), in_hi = tables.sums_at(fl(upper.lo()));
  PrimeSums out_lo = tables.sums_at(fl(lower.lo())), out_hi = tables.sums_at(fl(upper.hi()));
  F3F4Result r;
  r.inner_count = in_hi.pi >= in_lo.pi ? in_hi.pi - in_lo.pi : 0;
  r.outer_sum = out_hi.sum_p - out_lo.sum_p;
  r.f3_rhs = Enclosure(4.0) / 3.0 * sqrt(x) * (sqrt(lx) - Enclosure::decimal("2.14")) / (lx + log(lx));
  r.f4_rhs = Enclosure(4.0) / 9.0 * x * (1.0 + Enclosure::decimal("4.33") / lx);
  Enclosure count = Enclosure::from_uint(r.inner_count);
  // count is only a lower bound for f3, so a shortfall is never a counterexample
  r.f3 = count.lo() >= r.f3_rhs.hi() ? Verdict::holds : Verdict::indecisive;
  r.f4 = decide_lt(Enclosure::from_u128(r.outer_sum), r.f4_rhs);
  if (r.f4 == Verdict::fails) r.f4 = Verdict::indecisive;  // outer sum is only an upper bound for f4
  return r;
}

namespace {
std::string u128_decimal(unsigned __int128 v) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  } while (v != 0);
  return s;
}
}  // namespace

SweepCertificate f3_f4_check(const Enclosure& x, const PrimeTables& tables) {
  auto t0 = Clock::now();
  // reject only an x that is certainly below e^31; an enclosure of e^31 itself straddles it
  if (certainly_lt(x, exp(Enclosure(31.0)))) throw std::domain_error("f3/f4 check needs x >= e^31");
  F3F4Result r = f3_f4_values(x, tables);
  SweepCertificate cert;
  cert.kind = "f3_f4";
  cert.range_lo = x.lo();
  cert.range_hi = x.hi();
  cert.grid = "single point";
  cert.tables_limit = tables.limit();
  Enclosure m3 = Enclosure::from_uint(r.inner_count) - r.f3_rhs;
  Enclosure m4 = r.f4_rhs - Enclosure::from_u128(r.outer_sum);
  cert.worst_margin = m3.lo() / std::max(1.0, r.f3_rhs.hi()) < m4.lo() / r.f4_rhs.hi() ? m3 : m4;
  cert.worst_at = x.mid();
  cert.passed = r.f3 == Verdict::holds && r.f4 == Verdict::holds;
  cert.details = {{"x", enclosure_json(x)},
                  {"f3_lower_bound_count", r.inner_count},
                  {"f3_rhs", enclosure_json(r.f3_rhs)},
                  {"f4_upper_bound_sum", u128_decimal(r.outer_sum)},
                  {"f4_rhs", enclosure_json(r.f4_rhs)},
                  {"f3", to_string(r.f3)},
                  {"f4", to_string(r.f4)}};
  cert.duration_ms = ms_since(t0);
  if (!cert.passed) {
    const bool f3bad = r.f3 != Verdict::holds;
    throw IndecisiveError("f3/f4 check not decisive", x.mid(), f3bad ? Enclosure::from_uint(r.inner_count) : Enclosure::from_u128(r.outer_sum),
                          f3bad ? r.f3_rhs : r.f4_rhs);
  }
  return cert;
}

std::vector<AuxCheck> auxiliary_checks(const PrimeTables& tables) {
  const double A = AnalyticConstants::A;
  const double A10 = 10 * A;
  if (tables.limit() < A10) throw std::out_of_range("auxiliary checks need tables up to 10A");
  const Enclosure eps = AnalyticConstants::epsilon();
  std::vector<AuxCheck> out;
  auto add = [&](std::string name, double at, Enclosure lhs, Enclosure rhs) {
    out.push_back({std::move(name), at, lhs, rhs, decide_lt(lhs, rhs)});
  };

  // sums the tables do not carry
  CompensatedSum over_p_pm1, over_p;
  CompensatedSum over_p_pm1_A, over_p_A;
  tables.for_each_prime(0, static_cast<std::uint64_t>(A10), [&](std::uint64_t p) {
    double lp = std::log(static_cast<double>(p));
    auto pd = static_cast<double>(p);
    over_p_pm1.add(lp / (pd * (pd - 1)));
    over_p.add(lp / pd);
    if (pd <= A) {
      over_p_pm1_A = over_p_pm1;
      over_p_A = over_p;
    }
  });

  for (double x : {A, A10}) {
    Enclosure X(x), lx = log(X);
    add("dusart_theta", x, absval(tables.theta(x) - X), eps * X / lx);
    add("logp_over_pm1_below_logx_plus_0.8", x, tables.sum_logp_over_pm1(x), lx + Enclosure::decimal("0.8"));
    add("logp_over_p_below_logx", x, (x == A ? over_p_A : over_p).enclosure(), lx);
  }
  {
    Enclosure X(A), lA = log(X), X10(A10), l10 = log(X10);
    Enclosure lhs = -(Enclosure::decimal("0.008") * eps * X10 * X10 / l10);
    Enclosure rhs = tables.sum_plogp(A) - (0.5 + Enclosure::decimal("0.485") * eps / lA) * X * X;
    add("plogp_at_A_against_tail", A, lhs, rhs);
    add("plogp_lower_bound", A10, (0.5 - Enclosure::decimal("1.523") * eps / l10) * X10 * X10, tables.sum_plogp(A10));
    add("logp_over_p_pm1_plus_tail", A, over_p_pm1_A.enclosure() + 1.0 / sqrt(X), Enclosure::decimal("0.8"));
    Enclosure sq = sqrt(X10);
    add("theta_sqrt_lower", A10, Enclosure::decimal("0.94") * sq, tables.theta(std::floor(sq.lo())));
    add("small_prime_term", A10, small_prime_term(A10), Enclosure::decimal("1.32") * sq + log(l10));
    add("f1_at_10A", A10, f1(A10, tables), f1_target(A10));
  }
  return out;
}

SweepCertificate auxiliary_certificate(const PrimeTables& tables) {
  auto t0 = Clock::now();
  auto checks = auxiliary_checks(tables);
  SweepCertificate cert;
  cert.kind = "lemma_aux";
  cert.range_lo = AnalyticConstants::A;
  cert.range_hi = 10 * AnalyticConstants::A;
  cert.grid = "x = A, 10A";
  cert.tables_limit = tables.limit();
  cert.passed = true;
  cert.worst_margin = Enclosure(std::numeric_limits<double>::infinity());
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    Enclosure m = c.rhs - c.lhs;
    if (m.lo() < cert.worst_margin.lo()) {
      cert.worst_margin = m;
      cert.worst_at = c.at;
    }
    cert.passed = cert.passed && c.verdict == Verdict::holds;
    list.push_back({{"name", c.name}, {"at", c.at}, {"lhs", enclosure_json(c.lhs)}, {"rhs", enclosure_json(c.rhs)},
                    {"verdict", to_string(c.verdict)}});
  }
  cert.details = {{"checks", list}};
  cert.duration_ms = ms_since(t0);
  return cert;
}

}  // namespace effabc
