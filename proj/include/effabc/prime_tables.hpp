#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "effabc/enclosure.hpp"

namespace effabc {

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Double-double accumulator of nonnegative terms. Each term is assumed to
// carry relative error at most kTermRelErr (one log call plus a couple of
// roundings). TwoSum is exact, so the only accumulation error is the rounding
// of `lo += err`, bounded per step by ulp(max |lo|).
struct CompensatedSum {
  static constexpr double kTermRelErr = 0x1p-50;

  double hi = 0.0;
  double lo = 0.0;
  double lo_max = 0.0;
  std::uint64_t ops = 0;

  void add(double x) {
    double s = hi + x;
    double bb = s - hi;
    double err = (hi - (s - bb)) + (x - bb);
    hi = s;
    lo += err;
    lo_max = std::fmax(lo_max, std::fabs(lo));
    ++ops;
  }

  void merge(const CompensatedSum& o) {
    add(o.hi);
    add(o.lo);
    ops += o.ops;
    lo_max = std::fmax(lo_max, o.lo_max);
  }

  double value() const { return hi + lo; }
  Enclosure enclosure() const;

  bool operator==(const CompensatedSum&) const = default;
};

struct PrimeSums {
  std::uint64_t pi = 0;
  unsigned __int128 sum_p = 0;
  CompensatedSum theta;     // sum log p
  CompensatedSum plogp;     // sum p log p
  CompensatedSum logp_pm1;  // sum log p / (p - 1)

  void add_prime(std::uint64_t p);
  void merge(const PrimeSums& o);
  bool operator==(const PrimeSums&) const = default;
};

class PrimeTables {
 public:
  static constexpr std::uint64_t kMaxLimit = 1ull << 32;
  static constexpr std::uint64_t kDefaultStride = 1ull << 16;

  PrimeTables() = default;

  // Segments are distributed over the OpenMP team; the result does not depend on it.
  static PrimeTables build(std::uint64_t limit, std::uint64_t stride = kDefaultStride);
  // Single-threaded reference build, used to cross-check the parallel one.
  static PrimeTables build_serial(std::uint64_t limit, std::uint64_t stride = kDefaultStride);

  std::uint64_t limit() const { return limit_; }
  std::uint64_t stride() const { return stride_; }

  Enclosure theta(double x) const;
  std::uint64_t prime_pi(double x) const;
  Enclosure sum_plogp(double x) const;
  Enclosure sum_logp_over_pm1(double x) const;
  unsigned __int128 sum_primes(double x) const;
  PrimeSums sums_at(std::uint64_t x) const;

  // primes p with lo < p <= hi, ascending
  std::vector<std::uint64_t> primes_in(double lo, double hi) const;
  // calls f(p) for lo < p <= hi in ascending order, one segment at a time
  void for_each_prime(std::uint64_t lo, std::uint64_t hi, const std::function<void(std::uint64_t)>& f) const;

  const std::vector<PrimeSums>& checkpoints() const { return checkpoints_; }

  void save(const std::filesystem::path& path) const;
  // re-verifies `verify_fraction` of the checkpoint blocks against a fresh sieve
  static PrimeTables load(const std::filesystem::path& path, double verify_fraction = 0.01,
                          std::uint64_t seed = 1);
  // loads a cached table of at least `limit` from `dir` or builds (and stores) one
  static PrimeTables cached(const std::filesystem::path& dir, std::uint64_t limit);

 private:
  static PrimeTables build_impl(std::uint64_t limit, std::uint64_t stride, bool parallel);
  void init_base(std::uint64_t limit, std::uint64_t stride);
  PrimeSums block_sums(std::uint64_t block) const;
  std::uint64_t checked_cutoff(double x) const;

  std::uint64_t limit_ = 0;
  std::uint64_t stride_ = kDefaultStride;
  std::vector<std::uint32_t> base_primes_;
  std::vector<PrimeSums> checkpoints_;  // checkpoints_[b] covers p < b * stride
};

// Primes below 2^20 with outward-rounded prefix sums of log(p - 1); serves the
// sums over p < sqrt(x) + 1 and p(p - 1) < E.
struct SmallPrimeLogs {
  std::vector<std::uint32_t> primes;
  std::vector<double> lo_prefix, hi_prefix;  // sum over the first i primes
  static const SmallPrimeLogs& get();
  Enclosure sum_log_pm1(std::size_t count) const { return Enclosure(lo_prefix.at(count), hi_prefix.at(count)); }
  // number of primes p with (p - 1)^2 < x
  std::size_t count_below_sqrt_plus_one(double x) const;
  // number of primes p with p (p - 1) < e
  std::size_t count_pp1_below(std::uint64_t e) const;
};

// primes of [lo, hi) marked in `is_prime` (index i <-> lo + i)
void sieve_segment(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint32_t> base_primes,
                   std::vector<std::uint8_t>& is_prime);
std::vector<std::uint32_t> small_primes_upto(std::uint64_t n);

}  // namespace effabc
