#include "effabc/local_volume.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "effabc/analytic_bounds.hpp"

namespace effabc {

namespace {

using i128 = __int128;

std::uint64_t vp(std::uint64_t p, std::uint64_t n) {
  std::uint64_t v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

i128 ceil_div(i128 a, i128 b) {  // b > 0
  i128 q = a / b;
  if (a % b != 0 && a > 0) ++q;
  return q;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// e * a_p(e), e * b_p(e), e * d_p(e) as integers
struct ScaledIndices {
  i128 A, B, D;
};

ScaledIndices scaled_indices(std::uint64_t p, std::uint64_t e) {
  ScaledIndices s;
  s.A = static_cast<i128>((e + 1 + p - 2) / (p - 1));
  i128 pn = 1;
  i128 n = 0;
  while (pn * static_cast<i128>(p - 1) < static_cast<i128>(e)) {
    pn *= p;
    ++n;
  }
  s.B = n * static_cast<i128>(e) - pn;
  s.D = e % p != 0 ? static_cast<i128>(e) - 1 : static_cast<i128>(e) * (1 + vp(p, e));
  return s;
}

std::uint64_t lstar(std::uint64_t l) { return (l - 1) / 2; }

mpq_class to_mpq(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  mpz_class z(static_cast<unsigned long>(u >> 64));
  z <<= 64;
  z += mpz_class(static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFull));
  if (neg) z = -z;
  return mpq_class(z);
}

// e * sum_j B0(p, e, delta, u, j), integer-valued
i128 scaled_b0_sum(std::uint64_t p, std::uint64_t e, std::uint64_t u, std::uint64_t l, bool relaxed) {
  const ScaledIndices s = scaled_indices(p, e);
  const i128 E = e;
  const i128 v = p == 2 ? 2 : 1;
  const std::uint64_t g = std::gcd(e, 2 * l);
  const i128 m = static_cast<i128>(u) * g / (2 * l);  // u/(2l) = m/g
  const i128 eg = static_cast<i128>(e / g);
  i128 total = 0;
  for (std::uint64_t jj = 1; jj <= lstar(l); ++jj) {
    const i128 j = jj;
    i128 first;
    if (relaxed) {
      first = j * s.D + (j + 1) * s.A + E;
    } else {
      const i128 t = j * j * m * eg;
      first = ceil_div(-t + j * s.D + (j + 1) * s.A, E) * E + t;
    }
    total += std::max(first, v * (j + 1) * E) + (j + 1) * s.B;
  }
  return total;
}

mpq_class b1_from_sum(i128 sum, std::uint64_t e, int delta, std::uint64_t l, std::uint64_t e0) {
  mpq_class avg = to_mpq(sum) / mpq_class(mpz_class(static_cast<unsigned long>(e)) * lstar(l));
  mpq_class out = avg * mpq_class(4, static_cast<unsigned long>(l + 5));
  if (delta == 1) {
    std::uint64_t l0e = e % l == 0 ? l : 1;
    out -= 1 - mpq_class(1, static_cast<unsigned long>(e0 * l0e));
  }
  out.canonicalize();
  return out;
}

void check_prime_arg(std::uint64_t p) {
  if (!is_prime_u64(p)) throw std::domain_error("expected a prime, got " + std::to_string(p));
}

void check_admissible(std::uint64_t e, int delta, std::uint64_t u, std::uint64_t l) {
  if (e == 0) throw std::domain_error("index e must be positive");
  if (delta == 0) {
    if (u != 0) throw std::domain_error("delta = 0 requires u = 0");
  } else if (delta == 1) {
    if (u >= 2 * l || (static_cast<unsigned __int128>(e) * u) % (2 * l) != 0)
      throw std::domain_error("inadmissible u for delta = 1");
  } else {
    throw std::domain_error("delta must be 0 or 1");
  }
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

void RamificationDataset::validate() const {
  if (l0 < 5 || !is_prime_u64(l0)) throw std::domain_error("base prime must be a prime >= 5");
  if (e0 == 0) throw std::domain_error("base index must be positive");
  if (gen_multi.empty()) throw std::domain_error("S_gen must be nonempty");
  for (std::uint64_t g : gen_multi) {
    std::uint64_t e = g % l0 == 0 ? g / l0 : g;
    if (e < 1 || e > e0 || e % l0 == 0) throw std::domain_error("S_gen element " + std::to_string(g) + " not of the form e or e*l0");
  }
  for (std::uint64_t p : special_primes) {
    if (!is_prime_u64(p)) throw std::domain_error("special prime " + std::to_string(p) + " is not prime");
    if (good(p).empty() && multi(p).empty())
      throw std::domain_error("special prime " + std::to_string(p) + " has no indices");
    for (const auto* set : {&good(p), &multi(p)})
      for (std::uint64_t e : *set)
        if (e == 0) throw std::domain_error("indices must be positive");
  }
}

const std::set<std::uint64_t>& RamificationDataset::good(std::uint64_t p) const {
  static const std::set<std::uint64_t> empty;
  auto it = good_sets.find(p);
  return it == good_sets.end() ? empty : it->second;
}

const std::set<std::uint64_t>& RamificationDataset::multi(std::uint64_t p) const {
  static const std::set<std::uint64_t> empty;
  auto it = multi_sets.find(p);
  return it == multi_sets.end() ? empty : it->second;
}

void to_json(nlohmann::json& j, const RamificationDataset& d) {
  nlohmann::json good = nlohmann::json::object(), multi = nlohmann::json::object();
  for (const auto& [p, s] : d.good_sets) good[std::to_string(p)] = std::vector<std::uint64_t>(s.begin(), s.end());
  for (const auto& [p, s] : d.multi_sets) multi[std::to_string(p)] = std::vector<std::uint64_t>(s.begin(), s.end());
  j = nlohmann::json{{"id", d.id},
                     {"l0", d.l0},
                     {"e0", d.e0},
                     {"gen_multi", std::vector<std::uint64_t>(d.gen_multi.begin(), d.gen_multi.end())},
                     {"special_primes", std::vector<std::uint64_t>(d.special_primes.begin(), d.special_primes.end())},
                     {"good_sets", good},
                     {"multi_sets", multi}};
}

void from_json(const nlohmann::json& j, RamificationDataset& d) {
  d.id = j.at("id").get<std::string>();
  d.l0 = j.at("l0").get<std::uint64_t>();
  d.e0 = j.at("e0").get<std::uint64_t>();
  d.gen_multi = j.at("gen_multi").get<std::set<std::uint64_t>>();
  d.special_primes = j.at("special_primes").get<std::set<std::uint64_t>>();
  d.good_sets.clear();
  d.multi_sets.clear();
  for (const auto& [k, v] : j.at("good_sets").items()) d.good_sets[std::stoull(k)] = v.get<std::set<std::uint64_t>>();
  for (const auto& [k, v] : j.at("multi_sets").items()) d.multi_sets[std::stoull(k)] = v.get<std::set<std::uint64_t>>();
  d.validate();
}

RamificationDataset make_Rl(std::uint64_t l) {
  if (l < 11 || !is_prime_u64(l)) throw std::domain_error("R_l needs a prime l >= 11");
  RamificationDataset d;
  d.id = "R_" + std::to_string(l);
  d.l0 = l;
  d.e0 = 3;
  d.gen_multi = {1, 3, l, 3 * l};
  d.special_primes = {2, 3, l};
  for (std::uint64_t e : {2, 4, 6, 8, 12, 16, 24, 48}) d.good_sets[2].insert(e);
  d.good_sets[3] = {2, 6, 8};
  d.good_sets[l] = {l - 1, l * (l - 1), l * l - 1};
  d.multi_sets[2] = {2, 6, 2 * l, 6 * l};
  d.multi_sets[3] = {2, 6, 2 * l, 6 * l};
  d.multi_sets[l] = {l - 1, 3 * (l - 1), l * (l - 1), 3 * l * (l - 1)};
  d.validate();
  return d;
}

RamificationDataset make_Rl_prime(std::uint64_t l) {
  RamificationDataset d = make_Rl(l);
  d.id = "Rprime_" + std::to_string(l);
  d.good_sets[2] = {2};
  return d;
}

mpq_class a_p(std::uint64_t p, std::uint64_t e) {
  check_prime_arg(p);
  if (e == 0) throw std::domain_error("e must be positive");
  return mpq_class(to_mpq(scaled_indices(p, e).A) / e);
}

mpq_class b_p(std::uint64_t p, std::uint64_t e) {
  check_prime_arg(p);
  if (e == 0) throw std::domain_error("e must be positive");
  return mpq_class(to_mpq(scaled_indices(p, e).B) / e);
}

mpq_class d_p(std::uint64_t p, std::uint64_t e) {
  check_prime_arg(p);
  if (e == 0) throw std::domain_error("e must be positive");
  return mpq_class(to_mpq(scaled_indices(p, e).D) / e);
}

LocalIndexTriple local_indices(std::uint64_t p, std::uint64_t e) { return {a_p(p, e), b_p(p, e), d_p(p, e)}; }

std::vector<std::uint64_t> admissible_u(std::uint64_t e, int delta, std::uint64_t l) {
  if (delta == 0) return {0};
  std::uint64_t step = 2 * l / std::gcd(e, 2 * l);
  std::vector<std::uint64_t> out;
  for (std::uint64_t u = 0; u < 2 * l; u += step) out.push_back(u);
  return out;
}

mpq_class B0(std::uint64_t p, std::uint64_t e, int delta, std::uint64_t u, std::uint64_t j, std::uint64_t l) {
  check_prime_arg(p);
  check_admissible(e, delta, u, l);
  if (j < 1 || j > lstar(l)) throw std::domain_error("j outside [1, (l-1)/2]");
  LocalIndexTriple t = local_indices(p, e);
  mpq_class jq(static_cast<unsigned long>(j));
  mpq_class shift = jq * jq * static_cast<unsigned long>(u) / mpq_class(static_cast<unsigned long>(2 * l));
  shift.canonicalize();
  mpq_class inner = -shift + jq * t.d + (jq + 1) * t.a;
  inner.canonicalize();
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), inner.get_num_mpz_t(), inner.get_den_mpz_t());
  mpq_class first = mpq_class(c) + shift;
  mpq_class second = mpq_class(p == 2 ? 2 : 1) * (jq + 1);
  mpq_class out = (first > second ? first : second) + (jq + 1) * t.b;
  out.canonicalize();
  return out;
}

mpq_class B1(std::uint64_t p, std::uint64_t e, int delta, std::uint64_t u, std::uint64_t l, std::uint64_t e0) {
  check_prime_arg(p);
  check_admissible(e, delta, u, l);
  return b1_from_sum(scaled_b0_sum(p, e, u, l, false), e, delta, l, e0);
}

std::vector<IndexChoice> step0_choices(const RamificationDataset& d, std::uint64_t p) {
  std::vector<IndexChoice> out;
  if (d.special_primes.count(p)) {
    for (std::uint64_t e : d.good(p)) out.push_back({e, 0});
    for (std::uint64_t e : d.multi(p)) out.push_back({e, 1});
  } else {
    out.push_back({1, 0});
    for (std::uint64_t e : d.gen_multi) out.push_back({e, 1});
  }
  return out;
}

mpq_class B2(const RamificationDataset& d, std::uint64_t p) {
  check_prime_arg(p);
  bool first = true;
  mpq_class best;
  for (const auto& c : step0_choices(d, p)) {
    bool have = false;
    i128 sum = 0;
    for (std::uint64_t u : admissible_u(c.e, c.delta, d.l0)) {
      i128 s = scaled_b0_sum(p, c.e, u, d.l0, false);
      if (!have || s > sum) sum = s;
      have = true;
    }
    mpq_class b1 = b1_from_sum(sum, c.e, c.delta, d.l0, d.e0);
    if (first || b1 > best) best = b1;
    first = false;
  }
  return best;
}

mpq_class B2_relaxed(const RamificationDataset& d, std::uint64_t p) {
  check_prime_arg(p);
  bool first = true;
  mpq_class best;
  for (const auto& c : step0_choices(d, p)) {
    mpq_class b1 = b1_from_sum(scaled_b0_sum(p, c.e, 0, d.l0, true), c.e, c.delta, d.l0, d.e0);
    if (first || b1 > best) best = b1;
    first = false;
  }
  return best;
}

std::vector<std::uint64_t> vol_primes(const RamificationDataset& d) {
  std::set<std::uint64_t> ps(d.special_primes.begin(), d.special_primes.end());
  for (std::uint32_t p : small_primes_upto(d.e0 * d.l0 + 1)) ps.insert(p);
  return {ps.begin(), ps.end()};
}

std::string to_string(VolMethod m) {
  switch (m) {
    case VolMethod::exact: return "exact";
    case VolMethod::per_j_relaxed: return "per_j_relaxed";
    case VolMethod::closed_form: return "closed_form";
    default: return "f2_bound";
  }
}

VolMethod parse_vol_method(const std::string& s) {
  if (s == "exact") return VolMethod::exact;
  if (s == "relaxed" || s == "per_j_relaxed") return VolMethod::per_j_relaxed;
  if (s == "closed" || s == "closed_form") return VolMethod::closed_form;
  if (s == "f2" || s == "f2_bound") return VolMethod::f2_bound;
  throw std::invalid_argument("unknown Vol method: " + s);
}

void to_json(nlohmann::json& j, const VolResult& v) {
  j = nlohmann::json{{"value", {{"lo", v.value.lo()}, {"hi", v.value.hi()}}},
                     {"method", to_string(v.method)},
                     {"dataset_id", v.dataset_id}};
  if (!v.note.empty()) j["note"] = v.note;
}

Enclosure vol_prefactor(std::uint64_t l) {
  auto L = static_cast<long>(l);
  return Enclosure::from_rational(mpq_class(mpz_class(L * L + 5 * L), mpz_class(L * L + L - 12)));
}

namespace {

Enclosure clamp_nonneg(const Enclosure& x) { return Enclosure(std::max(0.0, x.lo()), std::max(0.0, x.hi())); }

VolResult assemble(const RamificationDataset& d, VolMethod method, bool relaxed) {
  d.validate();
  std::vector<std::uint64_t> ps = vol_primes(d);
  std::vector<mpq_class> b2(ps.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(ps.size()); ++i)
    b2[i] = relaxed ? B2_relaxed(d, ps[i]) : B2(d, ps[i]);
  Enclosure total = pi_enclosure();
  total = log(total);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (sgn(b2[i]) == 0) continue;
    total += Enclosure::from_rational(b2[i]) * log_of(static_cast<double>(ps[i]));
  }
  return {clamp_nonneg(vol_prefactor(d.l0) * total), method, d.id, ""};
}

}  // namespace

VolResult vol_closed_form(const RamificationDataset& d, const PrimeSums& s) {
  d.validate();
  const std::uint64_t E = d.e0 * d.l0;
  const std::uint64_t X = E + 1;
  const Enclosure Eenc = Enclosure::from_uint(E);
  Enclosure theta = s.theta.enclosure();
  Enclosure total = s.logp_pm1.enclosure() + theta - (s.plogp.enclosure() - theta) / Eenc;
  for (std::uint64_t p : d.special_primes) {
    if (p > X) continue;
    auto pd = static_cast<double>(p);
    total -= (1.0 / Enclosure(pd - 1) + 1.0 - Enclosure(pd - 1) / Eenc) * log_of(pd);
  }
  // p outside S0 with E > p(p - 1)
  {
    const auto& sp = SmallPrimeLogs::get();
    std::size_t c = sp.count_pp1_below(E);
    total += Enclosure::from_uint(c) * log_of(static_cast<double>(E)) - sp.sum_log_pm1(c);
    for (std::uint64_t p : d.special_primes)
      if (static_cast<unsigned __int128>(p) * (p - 1) < E) total -= log_of(static_cast<double>(E)) - log_of(p - 1.0);
  }
  for (std::uint64_t p : d.special_primes) {
    std::uint64_t e0p = 0, d0p = 0;
    for (const auto* set : {&d.good(p), &d.multi(p)})
      for (std::uint64_t e : *set) {
        e0p = std::max(e0p, e);
        d0p = std::max(d0p, 1 + vp(p, e));
      }
    Enclosure lp = log_of(static_cast<double>(p));
    if (e0p + 1 >= p) {
      mpq_class coef = mpq_class(1, p - 1) + 1 - mpq_class(p - 1, e0p);
      total += Enclosure::from_rational(coef) * lp;
    }
    total += Enclosure::from_uint(d0p) * lp;
    if (static_cast<unsigned __int128>(p) * (p - 1) < e0p)
      total += log_of(static_cast<double>(e0p)) - log_of(static_cast<double>(p - 1));
  }
  total += log(pi_enclosure());
  return {clamp_nonneg(vol_prefactor(d.l0) * total), VolMethod::closed_form, d.id, ""};
}

VolResult vol_f2_bound(const RamificationDataset& d, const PrimeTables& tables) {
  d.validate();
  const std::uint64_t l = d.l0;
  if (d.e0 != 3 || d.special_primes != std::set<std::uint64_t>{2, 3, l} || d.gen_multi != std::set<std::uint64_t>{1, 3, l, 3 * l})
    throw std::invalid_argument("f2 bound applies to R_l and R'_l only");
  if (tables.limit() < 3 * l) throw std::out_of_range("tables too small for f1(3l)");
  // R'_l only shrinks S_2^good, which lowers d0(2); the R_l chain still bounds it
  auto ld = static_cast<double>(l);
  Enclosure lnl = log_of(ld);
  Enclosure inner = f1(3.0 * ld, tables) + log(pi_enclosure()) +
                    (log_of(2.0) + 2.0 * log_of(3.0) + Enclosure(ld - 1) * lnl) / Enclosure(3 * ld) +
                    log_of(288.0) + 2.0 * lnl + log_of(24.0 * ld);
  VolResult r{clamp_nonneg(vol_prefactor(l) * inner), VolMethod::f2_bound, d.id, ""};
  r.note = "assembled with log(24l); the stated f2(l) uses the constant 9, below the assembled constants";
  return r;
}

VolResult vol(const RamificationDataset& d, VolMethod method, const PrimeTables* tables) {
  switch (method) {
    case VolMethod::exact: return assemble(d, method, false);
    case VolMethod::per_j_relaxed: return assemble(d, method, true);
    case VolMethod::closed_form: {
      if (!tables || tables->limit() < d.e0 * d.l0 + 1) throw std::out_of_range("tables too small for closed form");
      return vol_closed_form(d, tables->sums_at(d.e0 * d.l0 + 1));
    }
    default:
      if (!tables) throw std::out_of_range("f2 bound needs prime tables");
      return vol_f2_bound(d, *tables);
  }
}

}  // namespace effabc
