#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "effabc/abc_verifier.hpp"
#include "effabc/certificate.hpp"
#include "effabc/enclosure.hpp"

namespace effabc {

enum class B1Case { a, b, c };
std::string to_string(B1Case c);

// exponents with r' = min(r, s) <= s' = max(r, s)
struct ExponentTuple {
  int r_prime = 0, s_prime = 0, t = 0;
  int u0() const { return std::min(r_prime, t); }
};

// whether the case's hypothesis holds at these exponents
bool case_applies(B1Case c, const ExponentTuple& e);

struct CaseUse {
  B1Case which;
  ExponentTuple at;
};

enum class ConstraintKind { exact, lower_bound };

// A row of the Fermat height table: exponents described by r' and t (exact or lower bounds).
// b1 over the class is bounded by the max over `cover`: every tuple of the class
// lies in the region of some listed case, and the listed tuple is that case's worst point.
struct SignatureClass {
  std::string label;
  ConstraintKind kind = ConstraintKind::exact;
  int u0 = 0;
  int published_bound = 0;
  std::vector<CaseUse> cover;

  bool allow_13() const { return u0 >= 4; }
  DatasetKind dataset() const { return u0 >= 4 ? DatasetKind::Rprime : DatasetKind::R; }
  void validate() const;
};

std::vector<SignatureClass> table1_classes();
const SignatureClass& table1_class(const std::string& label);

// b1 of a single case at a single tuple, and the class maximum
Enclosure b1_case(B1Case which, const ExponentTuple& e, const CombinerParams& p);
Enclosure b1_value(const SignatureClass& cls, const CombinerParams& p);
Enclosure b2_value(const SignatureClass& cls, const CombinerParams& p);
std::pair<Enclosure, Enclosure> b1_b2(const SignatureClass& cls, const CombinerParams& p);

// excludes (b2/(1 - b1), k(S) log 2) when the interval is decisively nonempty
std::optional<ExclusionCertificate> exclusion_interval(const SignatureClass& cls, const CombinerParams& p,
                                                       const std::string& vol_policy);

struct FermatSolution {
  mpz_class x, y, z;
  unsigned r = 0, s = 0, t = 0;
};

struct RadicalCheck {
  std::string name;
  Enclosure lhs, rhs;  // claim lhs <= rhs
  bool holds = false;
};
// the radical lemma and its remark for one choice of prime subset C of N = abc / gcd(16, abc);
// bit i of subset_mask selects the i-th smallest prime of N
std::vector<RadicalCheck> radical_bound_checks(const FermatSolution& sol, std::uint64_t subset_mask);
bool radical_bound_check(const FermatSolution& sol, std::uint64_t subset_mask);

struct Table1Row {
  SignatureClass cls;
  Enclosure computed;  // bound on log(x^r y^s z^t)
  bool passed = false;
  double tolerance = 1.10;
  std::vector<ExclusionCertificate> chain;
  double wall_ms = 0;
};
void to_json(nlohmann::json& j, const Table1Row& r);

constexpr double kHeightCap = 1e6;
std::uint64_t table1_l_max();

// greedy covering of (B, 10^6) downward from the cap
Table1Row table1_row(const SignatureClass& cls, const VolTable& vt);
std::vector<Table1Row> table1(const PrimeTables& tables, const std::vector<std::string>& labels = {});

RecheckResult recheck_fermat(const ExclusionCertificate& c, const VolTable& vt);
// intervals (L_i, U_i) cover (bound, cap) with no gaps
RecheckResult check_chain(const std::vector<ExclusionCertificate>& chain, double bound, double cap);

// the cap h < 10^6 and the (5/16) radical estimate behind it
SweepCertificate height_cap_certificate();

SweepCertificate flt_contradiction(std::uint64_t p, const Enclosure& fermat_bound);
SweepCertificate cor48_33n_check(const Enclosure& bound_33n);

}  // namespace effabc
