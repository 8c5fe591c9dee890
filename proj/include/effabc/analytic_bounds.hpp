#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "effabc/certificate.hpp"
#include "effabc/enclosure.hpp"
#include "effabc/prime_tables.hpp"

namespace effabc {

struct AnalyticConstants {
  static constexpr double A = 2.89e7;  // exactly representable
  static const Enclosure& epsilon() {
    static const Enclosure e = Enclosure::decimal("0.006788");
    return e;
  }
  static const Enclosure& f1_fringe() {
    static const Enclosure e = Enclosure::decimal("0.01865");
    return e;
  }
  static const Enclosure& f2_fringe() {
    static const Enclosure e = Enclosure::decimal("0.06");
    return e;
  }
  static constexpr double f1_slope = 0.5;
  static constexpr double f2_slope = 1.5;
};

Enclosure f1(double x, const PrimeTables& tables);
Enclosure f2(double x, const PrimeTables& tables);
Enclosure f1_target(double n);  // n/2 + 0.01865 n / log n
Enclosure f2_target(double n);  // 3n/2 + 0.06 n / log n

// Incremental f1 evaluator over consecutive integers; seeded by a direct table query.
class F1Incremental {
 public:
  F1Incremental(const PrimeTables& tables, std::uint64_t n_start);
  std::uint64_t n() const { return n_; }
  Enclosure value() const;
  void advance();

 private:
  void refresh();
  void absorb(std::uint64_t p);

  const PrimeTables* tables_;
  std::uint64_t n_;
  PrimeSums sums_;
  Enclosure s1_, theta_, theta_minus_p_;
  std::size_t small_count_ = 0;
  std::vector<std::uint64_t> pending_;  // primes of the current segment, ascending
  std::size_t pending_pos_ = 0;
  std::uint64_t segment_end_ = 0;
};

// f1(n) < n/2 + 0.01865 n/log n for every integer n in [n_lo, n_hi]
SweepCertificate sweep_f1(std::uint64_t n_lo, std::uint64_t n_hi, const PrimeTables& tables,
                          std::uint64_t chunk = 1ull << 22);

struct F3F4Result {
  std::uint64_t inner_count = 0;    // primes certainly in S_x
  unsigned __int128 outer_sum = 0;  // sum of primes possibly in S_x
  Enclosure f3_rhs, f4_rhs;
  Verdict f3 = Verdict::indecisive, f4 = Verdict::indecisive;
};
F3F4Result f3_f4_values(const Enclosure& x, const PrimeTables& tables);
SweepCertificate f3_f4_check(const Enclosure& x, const PrimeTables& tables);
std::uint64_t f3_f4_required_limit(const Enclosure& x);

struct AuxCheck {
  std::string name;
  double at = 0;
  Enclosure lhs, rhs;  // claim: lhs < rhs
  Verdict verdict = Verdict::indecisive;
};
// the finite computations inside the proof, at x = A and x = 10A (tables must reach 10A)
std::vector<AuxCheck> auxiliary_checks(const PrimeTables& tables);
SweepCertificate auxiliary_certificate(const PrimeTables& tables);

}  // namespace effabc
