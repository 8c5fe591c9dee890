#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "effabc/enclosure.hpp"

namespace effabc {

inline constexpr const char* kSchemaVersion = "effabc-cert/1";

nlohmann::json enclosure_json(const Enclosure& e);
Enclosure enclosure_from_json(const nlohmann::json& j);

// An inequality that could not be decided at the working precision.
class IndecisiveError : public std::runtime_error {
 public:
  IndecisiveError(const std::string& what, double at, Enclosure lhs, Enclosure rhs)
      : std::runtime_error(what), at_(at), lhs_(lhs), rhs_(rhs) {}
  double at() const { return at_; }
  const Enclosure& lhs() const { return lhs_; }
  const Enclosure& rhs() const { return rhs_; }

 private:
  double at_;
  Enclosure lhs_, rhs_;
};

struct SweepCertificate {
  std::string kind;
  double range_lo = 0;
  double range_hi = 0;
  std::string grid;
  Enclosure worst_margin;
  double worst_at = 0;
  std::uint64_t tables_limit = 0;
  double duration_ms = 0;
  bool passed = false;
  nlohmann::json details = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const SweepCertificate& c);
void from_json(const nlohmann::json& j, SweepCertificate& c);

enum class CheckKind { abc_sweep, fermat_case };

// S is always a run of consecutive admissible primes: every prime p with
// window_lo < p <= window_hi, p >= 11, p not in `excluded`.
struct PrimeWindow {
  std::uint64_t window_lo = 0;
  std::uint64_t window_hi = 0;
  std::vector<std::uint64_t> excluded;
  std::uint64_t n = 0;
};

struct ExclusionCertificate {
  CheckKind check_kind = CheckKind::abc_sweep;
  PrimeWindow S;
  int k = 2;
  std::string dataset;     // "R" or "Rprime"
  std::string vol_policy;  // e.g. "exact<=200,closed_form"
  Enclosure a1, a2, a3;
  Enclosure k_s_log2;      // k(S) log 2
  std::string k_s;         // k(S) as a decimal integer

  // abc_sweep: certified h-interval and margins at its endpoints
  double h_lo = 0, h_hi = 0;
  double step_ratio = 0;
  Enclosure margin_lo, margin_hi;             // the margin that is required to be negative
  Enclosure loose_margin_lo, loose_margin_hi; // a1 h + a2 + k h/n - 8 sqrt(h log h) + 4 log 2, recorded only

  // fermat_case: excluded open interval (L, U)
  std::string signature_class;
  Enclosure b1, b2, L;
  nlohmann::json extremal = nlohmann::json::array();
};

void to_json(nlohmann::json& j, const ExclusionCertificate& c);
void from_json(const nlohmann::json& j, ExclusionCertificate& c);
std::string to_string(CheckKind k);

}  // namespace effabc
