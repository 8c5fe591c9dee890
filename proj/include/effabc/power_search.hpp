#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "effabc/certificate.hpp"
#include "effabc/enclosure.hpp"

namespace effabc {

// Residues of a value modulo two fixed primes. Additive, so the residue of a
// difference comes from the residues of its terms.
struct Digest {
  std::uint64_t r1 = 0;  // mod 2^61 - 1
  std::uint64_t r2 = 0;  // mod 2^64 - 59
  bool operator==(const Digest&) const = default;
};
Digest digest_of(const mpz_class& v);
Digest digest_pow(std::uint64_t m, std::uint64_t k);
Digest digest_sub(const Digest& a, const Digest& b);

class IndexCapacityError : public std::runtime_error {
 public:
  IndexCapacityError(const std::string& what, double estimate) : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

// Every m^k <= V_max with m >= 2, k >= k_min, stored once as (m, K) with m not a
// perfect power; the other representations are (m^d, K/d) for d | K with K/d >= k_min.
class PerfectPowerIndex {
 public:
  struct Entry {
    std::uint32_t base;  // not a perfect power
    std::uint32_t exp;
    double log2v;  // exp * log2(base), rounded to nearest
    Digest digest;
  };

  static constexpr std::size_t kMaxEntries = 200'000'000;
  static PerfectPowerIndex build(unsigned k_min, const mpz_class& v_max);
  // sizes the index by log2 of the largest value
  static PerfectPowerIndex build_log2(unsigned k_min, double log2_vmax);

  unsigned k_min() const { return k_min_; }
  double log2_vmax() const { return log2_vmax_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }

  mpz_class value(std::size_t i) const;
  // all (base, exponent) pairs with exponent >= k_min, largest base first
  std::vector<std::pair<mpz_class, unsigned>> representations(std::size_t i) const;

  // entry index whose value equals v, confirmed exactly
  std::optional<std::size_t> find(const mpz_class& v) const;
  // candidates by digest alone; callers confirm
  std::optional<std::size_t> find_digest(const Digest& d) const;
  // number of entries with log2 value below x (entries are sorted by value)
  std::size_t count_log2_below(double x) const;

 private:
  void index_digests();
  unsigned k_min_ = 2;
  double log2_vmax_ = 0;
  mpz_class v_max_;
  std::vector<Entry> entries_;
  std::vector<std::uint32_t> slots_;  // open addressing on r1, stores index + 1
};

struct SolutionRecord {
  mpz_class x, y, z;
  unsigned r = 0, s = 0, t = 0;
  Enclosure h;
  bool primitive = false;
  bool operator<(const SolutionRecord& o) const;
  bool operator==(const SolutionRecord& o) const;
};
void to_json(nlohmann::json& j, const SolutionRecord& s);
// x^r + y^s == z^t and the gcd flag, recomputed from scratch
bool verify_solution(const SolutionRecord& s);

struct SearchCaps {
  double log2_zt_max = 0;   // log2 z^t <= (log2(2 e^h) - k_min)/2, plus one bit of slack
  double log2_xr_slack = 2; // log2 x^r <= log2(4 e^h) - 2 log2 z^t
};

struct SearchReport {
  double h_max = 0;
  unsigned k_min = 0;
  bool primitive_only = true;
  SearchCaps caps;
  std::size_t index_size = 0;
  std::uint64_t candidates_tested = 0;
  std::uint64_t digest_hits = 0;
  std::vector<SolutionRecord> solutions;
  std::vector<SolutionRecord> boundary;
  std::vector<SolutionRecord> one_base;  // 1 + y^s = z^t from the separate scan
  double duration_ms = 0;
  bool exhaustive = true;
};
void to_json(nlohmann::json& j, const SearchReport& r);

constexpr double kSearchHardCap = 700;

SearchCaps search_caps(double h_max, unsigned k_min);
// solutions with all exponents >= k_min, bases >= 2, x^r <= y^s and h < h_max
SearchReport search(double h_max, unsigned k_min, bool primitive_only = true);
SearchReport search_serial(double h_max, unsigned k_min, bool primitive_only = true);
SearchReport search_with_index(const PerfectPowerIndex& idx, double h_max, bool primitive_only, bool parallel);

// 1 + y^s = z^t with s, t >= k_min and log(y^s z^t) < h_max
std::vector<SolutionRecord> one_base_scan(const PerfectPowerIndex& idx, double h_max);

// A pruned pair: z^t from entry v and the first x^r beyond the cap.
struct PruneEvent {
  std::size_t v, x;
};
// the pruning inequality for one event: log x^r + log(z^t/2) + log z^t >= h_max
bool prune_justified(const PerfectPowerIndex& idx, const PruneEvent& e, double h_max);
std::vector<PruneEvent> sample_prune_events(const PerfectPowerIndex& idx, double h_max, std::size_t count,
                                            std::uint64_t seed);

struct CatalogEntry {
  SolutionRecord sol;
  std::string text;
};
std::vector<CatalogEntry> known_solutions();
SweepCertificate verify_catalog();

}  // namespace effabc
