#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "effabc/certificate.hpp"
#include "effabc/enclosure.hpp"
#include "effabc/local_volume.hpp"
#include "effabc/prime_tables.hpp"

namespace effabc {

class FactoredInteger {
 public:
  FactoredInteger() = default;
  explicit FactoredInteger(std::map<std::uint64_t, std::uint64_t> factors);
  // trial division; refuses cofactors that are not fully split below `bound`
  static FactoredInteger factor(const mpz_class& n, std::uint64_t bound = 1u << 20);

  const std::map<std::uint64_t, std::uint64_t>& factors() const { return factors_; }
  std::uint64_t v(std::uint64_t p) const;
  mpz_class value() const;
  Enclosure h() const;
  Enclosure rad_log() const;
  // N_l: the part of N made of primes whose exponent is divisible by l
  FactoredInteger part_divisible_by(std::uint64_t l) const;

 private:
  std::map<std::uint64_t, std::uint64_t> factors_;
};

// sign of sum c_q log q, exactly
int log_combination_sign(const std::map<std::uint64_t, mpz_class>& coeffs);

struct Lemma31Report {
  bool identity_holds = false;    // sum_{p in S} v_p(N) log p = log N_A
  bool inequality_holds = false;  // sum_{p in S} log N_p <= (k-1) log N_B
  bool holds() const { return identity_holds && inequality_holds; }
};
// throws std::domain_error unless k(S) > h/log 2 and |S| >= 2
Lemma31Report lemma31_part_i(const FactoredInteger& N, const std::vector<std::uint64_t>& S, int k);
bool lemma31_part_i_check(const FactoredInteger& N, const std::vector<std::uint64_t>& S, int k);

// the product of the k smallest elements
mpz_class k_of(const std::vector<std::uint64_t>& sorted_primes, int k);

inline Enclosure a1_term(std::uint64_t l) {
  const double L = static_cast<double>(l);
  return Enclosure(11 * L + 31) / Enclosure(L * L + L - 12);
}

enum class DatasetKind { R, Rprime };
std::string to_string(DatasetKind k);
RamificationDataset make_dataset(DatasetKind k, std::uint64_t l);

// Vol(l) for every prime 11 <= l <= l_max: exact up to exact_cutoff, closed form beyond.
class VolTable {
 public:
  static VolTable build(std::uint64_t l_max, DatasetKind kind, const PrimeTables& tables,
                        std::uint64_t exact_cutoff = 200);
  // same values from a caller-supplied function (tests, f2 policy)
  static VolTable from_function(std::uint64_t l_max, DatasetKind kind, std::string policy,
                                const std::function<Enclosure(std::uint64_t)>& vol);

  std::uint64_t l_max() const { return l_max_; }
  DatasetKind kind() const { return kind_; }
  const std::string& policy() const { return policy_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }
  Enclosure vol(std::uint64_t l) const;
  std::size_t index_above(std::uint64_t x) const;  // first prime index with primes()[i] > x

  struct Sums {
    std::uint64_t n = 0;
    Enclosure a1_sum, vol_sum, log_sum;
  };
  // prefix-sum evaluation over primes in (lo, hi] minus the excluded ones
  Sums window_sums(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint64_t>& excluded) const;

 private:
  void finish();
  std::uint64_t l_max_ = 0;
  DatasetKind kind_ = DatasetKind::R;
  std::string policy_;
  std::vector<std::uint64_t> primes_;
  std::vector<Enclosure> vols_;
  // prefix sums over the first i primes, as outward-rounded lower/upper values
  std::vector<double> a1_lo_, a1_hi_, vol_lo_, vol_hi_, log_lo_, log_hi_;
};

struct CombinerParams {
  PrimeWindow S;
  int k = 2;
  std::uint64_t p0 = 0;  // smallest element of S
  mpz_class k_S;
  Enclosure a1, a2, a3;
  std::uint64_t n() const { return S.n; }
};

// 13 is dropped unless allow_13; anything below 11 is never admissible
PrimeWindow make_window(const VolTable& vt, std::uint64_t window_lo, std::uint64_t window_hi, bool allow_13);
CombinerParams window_params(const VolTable& vt, const PrimeWindow& S, int k);
// term-by-term summation over an explicit prime list; independent of the prefix sums
CombinerParams direct_params(const std::vector<std::uint64_t>& S, int k,
                             const std::function<Enclosure(std::uint64_t)>& vol);
std::vector<std::uint64_t> window_primes(const VolTable& vt, const PrimeWindow& S);

// (3 + a1) rad_log + a2 + k h / n
Enclosure combiner_bound(const CombinerParams& params, const Enclosure& h, const Enclosure& rad_log);

// upper bound for h - 3 log rad N + 4 log 2 - 8 sqrt(h log h) under the combiner inequality
Enclosure abc_margin(const CombinerParams& p, const Enclosure& h);
// a1 h + a2 + k h/n - 8 sqrt(h log h) + 4 log 2
Enclosure abc_loose_margin(const CombinerParams& p, const Enclosure& h);

class UncoverableIntervalError : public std::runtime_error {
 public:
  UncoverableIntervalError(const std::string& what, double h) : std::runtime_error(what), h_(h) {}
  double h() const { return h_; }

 private:
  double h_;
};

struct SweepOptions {
  double h_lo = 680;
  double h_hi = 0;  // 0 means e^31
  double step_ratio = 1.1;
  std::filesystem::path out;  // JSON-lines; empty for none
  bool resume = false;
  std::function<void(const std::string&)> progress;
};

double e31();
// largest prime that a sweep up to h_hi may put in a window
std::uint64_t sweep_l_max(double h_hi);

std::vector<ExclusionCertificate> sweep_abc(const SweepOptions& opt, const VolTable& vt);

struct RecheckResult {
  bool ok = false;
  std::string reason;
};
// re-derives a1, a2, a3, k(S) and the margins from the window and Vol values alone
RecheckResult recheck(const ExclusionCertificate& c, const VolTable& vt);
// gap-free coverage of [h_lo, h_hi]
RecheckResult check_coverage(const std::vector<ExclusionCertificate>& certs, double h_lo, double h_hi);

std::vector<ExclusionCertificate> read_certificates(const std::filesystem::path& path);

struct HeightConstantValues {
  Enclosure f10;
  Enclosure min_derivative;  // over the grid
  double min_derivative_at = 0;
  bool identity_exact = false;
};
Enclosure height_constant_f(const Enclosure& x);
Enclosure height_constant_fprime(const Enclosure& x);
HeightConstantValues height_constant_values(std::size_t grid_points = 4000);
SweepCertificate height_constant_check();

}  // namespace effabc
