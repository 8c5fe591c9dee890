#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "effabc/enclosure.hpp"
#include "effabc/prime_tables.hpp"

namespace effabc {

struct RamificationDataset {
  std::string id;
  std::uint64_t l0 = 0;  // base prime
  std::uint64_t e0 = 0;  // base index
  std::set<std::uint64_t> gen_multi;
  std::set<std::uint64_t> special_primes;
  std::map<std::uint64_t, std::set<std::uint64_t>> good_sets;
  std::map<std::uint64_t, std::set<std::uint64_t>> multi_sets;

  void validate() const;
  const std::set<std::uint64_t>& good(std::uint64_t p) const;
  const std::set<std::uint64_t>& multi(std::uint64_t p) const;
};

void to_json(nlohmann::json& j, const RamificationDataset& d);
void from_json(const nlohmann::json& j, RamificationDataset& d);

RamificationDataset make_Rl(std::uint64_t l);
RamificationDataset make_Rl_prime(std::uint64_t l);

struct LocalIndexTriple {
  mpq_class a, b, d;
};

mpq_class a_p(std::uint64_t p, std::uint64_t e);
mpq_class b_p(std::uint64_t p, std::uint64_t e);
mpq_class d_p(std::uint64_t p, std::uint64_t e);
LocalIndexTriple local_indices(std::uint64_t p, std::uint64_t e);

// admissible u for (e, delta): multiples of 2l/gcd(e, 2l) in [0, 2l), or {0}
std::vector<std::uint64_t> admissible_u(std::uint64_t e, int delta, std::uint64_t l);

mpq_class B0(std::uint64_t p, std::uint64_t e, int delta, std::uint64_t u, std::uint64_t j, std::uint64_t l);
mpq_class B1(std::uint64_t p, std::uint64_t e, int delta, std::uint64_t u, std::uint64_t l, std::uint64_t e0);
mpq_class B2(const RamificationDataset& d, std::uint64_t p);
// same maximisation with ceil(x) replaced by x + 1, which removes u
mpq_class B2_relaxed(const RamificationDataset& d, std::uint64_t p);

struct IndexChoice {
  std::uint64_t e;
  int delta;
};
// the (e, delta) pairs the dataset attaches to p
std::vector<IndexChoice> step0_choices(const RamificationDataset& d, std::uint64_t p);
// primes entering the Vol sum: p <= e0*l0 + 1, plus S0
std::vector<std::uint64_t> vol_primes(const RamificationDataset& d);

enum class VolMethod { exact, per_j_relaxed, closed_form, f2_bound };
std::string to_string(VolMethod m);
VolMethod parse_vol_method(const std::string& s);

struct VolResult {
  Enclosure value;
  VolMethod method = VolMethod::exact;
  std::string dataset_id;
  std::string note;
};
void to_json(nlohmann::json& j, const VolResult& v);

Enclosure vol_prefactor(std::uint64_t l);

VolResult vol(const RamificationDataset& d, VolMethod method, const PrimeTables* tables = nullptr);
// closed-form bound from the prime sums at e0*l0 + 1 (lets callers batch the table queries)
VolResult vol_closed_form(const RamificationDataset& d, const PrimeSums& sums_at_cutoff);
// certified version of the f2 assembly: the chain of inequalities ending in
// f1(3l) + log pi + (log 2 + 2 log 3 + (l-1) log l)/(3l) + log(2^5 3^2 l^2) + log(24 l)
VolResult vol_f2_bound(const RamificationDataset& d, const PrimeTables& tables);

bool is_prime_u64(std::uint64_t n);

}  // namespace effabc
