#include "effabc/enclosure.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>

#include <mpfr.h>

namespace effabc {

namespace {

std::atomic<int> g_tier{static_cast<int>(PrecisionTier::standard)};

// MPFR at 53 bits gives a correctly rounded double in the requested direction
double mpfr_eval(int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), double x, mpfr_rnd_t rnd) {
  mpfr_t a, r;
  mpfr_init2(a, 53);
  mpfr_init2(r, 53);
  mpfr_set_d(a, x, MPFR_RNDN);
  fn(r, a, rnd);
  double out = mpfr_get_d(r, rnd);
  mpfr_clear(a);
  mpfr_clear(r);
  return out;
}

double mpfr_const(int (*fn)(mpfr_ptr, mpfr_rnd_t), mpfr_rnd_t rnd) {
  mpfr_t r;
  mpfr_init2(r, 53);
  fn(r, rnd);
  double out = mpfr_get_d(r, rnd);
  mpfr_clear(r);
  return out;
}

}  // namespace

void set_precision_tier(PrecisionTier tier) { g_tier.store(static_cast<int>(tier)); }
PrecisionTier precision_tier() { return static_cast<PrecisionTier>(g_tier.load()); }

PrecisionTier parse_precision_tier(std::string_view s) {
  if (s == "standard") return PrecisionTier::standard;
  if (s == "extended") return PrecisionTier::extended;
  throw std::invalid_argument("unknown precision tier: " + std::string(s));
}

std::string to_string(PrecisionTier tier) {
  return tier == PrecisionTier::standard ? "standard" : "extended";
}

Enclosure Enclosure::from_int(long long v) {
  if (v >= 0) return from_uint(static_cast<unsigned long long>(v));
  return -from_uint(static_cast<unsigned long long>(-(v + 1)) + 1);
}

Enclosure Enclosure::from_uint(unsigned long long v) {
  double d = static_cast<double>(v);
  if (v <= (1ull << 53)) return Enclosure(d);
  return Enclosure(next_down(d), next_up(d));
}

Enclosure Enclosure::from_u128(unsigned __int128 v) {
  double d = static_cast<double>(v);
  if (v <= (static_cast<unsigned __int128>(1) << 53)) return Enclosure(d);
  return Enclosure(next_down(d), next_up(d));
}

Enclosure Enclosure::from_mpz(const mpz_class& v) {
  double d = v.get_d();  // truncates toward zero
  int c = cmp(v, d);
  if (c == 0) return Enclosure(d);
  return c > 0 ? Enclosure(d, next_up(d)) : Enclosure(next_down(d), d);
}

Enclosure Enclosure::from_rational(const mpq_class& q) {
  double d = q.get_d();
  int c = cmp(q, mpq_class(d));
  if (c == 0) return Enclosure(d);
  return c > 0 ? Enclosure(d, next_up(d)) : Enclosure(next_down(d), d);
}

Enclosure Enclosure::decimal(std::string_view s) {
  std::string digits;
  long exponent = 0;
  bool negative = false;
  bool seen_point = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) negative = s[i++] == '-';
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      exponent += std::stol(std::string(s.substr(i + 1)));
      break;
    } else {
      throw std::invalid_argument("bad decimal literal: " + std::string(s));
    }
  }
  if (digits.empty()) throw std::invalid_argument("bad decimal literal: " + std::string(s));
  mpq_class q{mpz_class(digits, 10)};
  mpz_class ten = 10;
  mpz_class scale;
  mpz_pow_ui(scale.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(std::labs(exponent)));
  if (exponent >= 0) q *= scale; else q /= scale;
  q.canonicalize();
  if (negative) q = -q;
  return from_rational(q);
}

Enclosure& Enclosure::operator+=(const Enclosure& o) {
  double lo = lo_ + o.lo_;
  double hi = hi_ + o.hi_;
  lo_ = next_down(lo);
  hi_ = next_up(hi);
  return *this;
}

Enclosure& Enclosure::operator-=(const Enclosure& o) {
  double lo = lo_ - o.hi_;
  double hi = hi_ - o.lo_;
  lo_ = next_down(lo);
  hi_ = next_up(hi);
  return *this;
}

Enclosure& Enclosure::operator*=(const Enclosure& o) {
  double a = lo_ * o.lo_, b = lo_ * o.hi_, c = hi_ * o.lo_, d = hi_ * o.hi_;
  lo_ = next_down(std::min({a, b, c, d}));
  hi_ = next_up(std::max({a, b, c, d}));
  return *this;
}

Enclosure& Enclosure::operator/=(const Enclosure& o) {
  if (o.lo_ <= 0.0 && o.hi_ >= 0.0) throw std::domain_error("enclosure division by interval containing 0");
  double a = lo_ / o.lo_, b = lo_ / o.hi_, c = hi_ / o.lo_, d = hi_ / o.hi_;
  lo_ = next_down(std::min({a, b, c, d}));
  hi_ = next_up(std::max({a, b, c, d}));
  return *this;
}

Enclosure log(const Enclosure& x) {
  if (!(x.lo() > 0.0)) throw std::domain_error("log of enclosure reaching 0");
  if (precision_tier() == PrecisionTier::extended)
    return Enclosure(mpfr_eval(mpfr_log, x.lo(), MPFR_RNDD), mpfr_eval(mpfr_log, x.hi(), MPFR_RNDU));
  return Enclosure(step_down(std::log(x.lo()), kLibmUlps), step_up(std::log(x.hi()), kLibmUlps));
}

Enclosure exp(const Enclosure& x) {
  if (precision_tier() == PrecisionTier::extended)
    return Enclosure(mpfr_eval(mpfr_exp, x.lo(), MPFR_RNDD), mpfr_eval(mpfr_exp, x.hi(), MPFR_RNDU));
  double lo = std::max(0.0, step_down(std::exp(x.lo()), kLibmUlps));
  return Enclosure(lo, step_up(std::exp(x.hi()), kLibmUlps));
}

Enclosure sqrt(const Enclosure& x) {
  if (x.lo() < 0.0) throw std::domain_error("sqrt of enclosure reaching below 0");
  // IEEE sqrt is correctly rounded, so one ulp is enough
  double lo = x.lo() == 0.0 ? 0.0 : next_down(std::sqrt(x.lo()));
  return Enclosure(lo, next_up(std::sqrt(x.hi())));
}

Enclosure hull(const Enclosure& a, const Enclosure& b) {
  return Enclosure(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Enclosure max(const Enclosure& a, const Enclosure& b) {
  return Enclosure(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Enclosure min(const Enclosure& a, const Enclosure& b) {
  return Enclosure(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

Enclosure log_of(double positive) { return log(Enclosure(positive)); }

Enclosure log_of(const mpz_class& positive) {
  if (sgn(positive) <= 0) throw std::domain_error("log of non-positive integer");
  if (mpz_sizeinbase(positive.get_mpz_t(), 2) <= 53) return log_of(positive.get_d());
  long e = 0;
  double m = mpz_get_d_2exp(&e, positive.get_mpz_t());  // positive in [m, m + 2^-53) * 2^e
  Enclosure mant(m, next_up(m));
  return log(mant) + Enclosure::from_int(e) * log2_enclosure();
}

const Enclosure& pi_enclosure() {
  static const Enclosure v(mpfr_const(mpfr_const_pi, MPFR_RNDD), mpfr_const(mpfr_const_pi, MPFR_RNDU));
  return v;
}

const Enclosure& log2_enclosure() {
  static const Enclosure v(mpfr_const(mpfr_const_log2, MPFR_RNDD), mpfr_const(mpfr_const_log2, MPFR_RNDU));
  return v;
}

Verdict decide_lt(const Enclosure& a, const Enclosure& b) {
  if (a.hi() < b.lo()) return Verdict::holds;
  if (a.lo() >= b.hi()) return Verdict::fails;
  return Verdict::indecisive;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    default: return "indecisive";
  }
}

}  // namespace effabc
