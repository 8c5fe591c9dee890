#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace effabc {

inline double next_up(double x) {
  if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) return x;
  if (x == 0.0) return std::numeric_limits<double>::denorm_min();
  auto bits = std::bit_cast<std::uint64_t>(x);
  bits = x > 0 ? bits + 1 : bits - 1;
  return std::bit_cast<double>(bits);
}

inline double next_down(double x) { return -next_up(-x); }

inline double step_up(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_up(x);
  return x;
}

inline double step_down(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_down(x);
  return x;
}

// Elementary functions either trust libm to within kLibmUlps ulps (standard)
// or are evaluated through MPFR with directed rounding (extended).
enum class PrecisionTier { standard, extended };

void set_precision_tier(PrecisionTier tier);
PrecisionTier precision_tier();
PrecisionTier parse_precision_tier(std::string_view s);
std::string to_string(PrecisionTier tier);

inline constexpr int kLibmUlps = 2;

class Enclosure {
 public:
  constexpr Enclosure() = default;
  constexpr explicit Enclosure(double v) : lo_(v), hi_(v) {}
  Enclosure(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("enclosure with lo > hi or NaN");
  }

  static Enclosure from_int(long long v);
  static Enclosure from_uint(unsigned long long v);
  static Enclosure from_u128(unsigned __int128 v);
  static Enclosure from_mpz(const mpz_class& v);
  static Enclosure from_rational(const mpq_class& q);
  // decimal literal such as "0.01865"; encloses the exact decimal value
  static Enclosure decimal(std::string_view s);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  double mid() const { return lo_ + (hi_ - lo_) / 2; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Enclosure& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool overlaps(const Enclosure& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

  Enclosure operator-() const { return Enclosure(-hi_, -lo_); }
  Enclosure& operator+=(const Enclosure& o);
  Enclosure& operator-=(const Enclosure& o);
  Enclosure& operator*=(const Enclosure& o);
  Enclosure& operator/=(const Enclosure& o);

  friend Enclosure operator+(Enclosure a, const Enclosure& b) { return a += b; }
  friend Enclosure operator-(Enclosure a, const Enclosure& b) { return a -= b; }
  friend Enclosure operator*(Enclosure a, const Enclosure& b) { return a *= b; }
  friend Enclosure operator/(Enclosure a, const Enclosure& b) { return a /= b; }
  friend Enclosure operator+(Enclosure a, double b) { return a += Enclosure(b); }
  friend Enclosure operator-(Enclosure a, double b) { return a -= Enclosure(b); }
  friend Enclosure operator*(Enclosure a, double b) { return a *= Enclosure(b); }
  friend Enclosure operator/(Enclosure a, double b) { return a /= Enclosure(b); }
  friend Enclosure operator+(double a, const Enclosure& b) { return Enclosure(a) + b; }
  friend Enclosure operator-(double a, const Enclosure& b) { return Enclosure(a) - b; }
  friend Enclosure operator*(double a, const Enclosure& b) { return Enclosure(a) * b; }
  friend Enclosure operator/(double a, const Enclosure& b) { return Enclosure(a) / b; }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

Enclosure log(const Enclosure& x);
Enclosure exp(const Enclosure& x);
Enclosure sqrt(const Enclosure& x);
Enclosure hull(const Enclosure& a, const Enclosure& b);
Enclosure max(const Enclosure& a, const Enclosure& b);
Enclosure min(const Enclosure& a, const Enclosure& b);

// log of a positive integer, the common case for prime sums
Enclosure log_of(double positive);
Enclosure log_of(const mpz_class& positive);

const Enclosure& pi_enclosure();
const Enclosure& log2_enclosure();

// strict comparisons that only answer true when the enclosures separate
inline bool certainly_lt(const Enclosure& a, const Enclosure& b) { return a.hi() < b.lo(); }
inline bool certainly_gt(const Enclosure& a, const Enclosure& b) { return a.lo() > b.hi(); }
inline bool certainly_le(const Enclosure& a, const Enclosure& b) { return a.hi() <= b.lo(); }

enum class Verdict { holds, fails, indecisive };
// decide a < b
Verdict decide_lt(const Enclosure& a, const Enclosure& b);
std::string to_string(Verdict v);

}  // namespace effabc
