#pragma once

#include <cmath>
#include <set>
#include <tuple>

#include <gmpxx.h>

#include "effabc/power_search.hpp"

namespace effabc::oracle {

inline mpz_class powz(const mpz_class& b, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

using Key = std::tuple<mpz_class, unsigned, mpz_class, unsigned, mpz_class, unsigned>;

inline Key key(const SolutionRecord& s) { return {s.x, s.r, s.y, s.s, s.z, s.t}; }

// x^r + y^s = z^t with x^r <= y^s, by loops over bases and exponents of the two
// summands; z^t is recognised with mpz_root. No index, no digests.
inline std::set<Key> naive_search(double h_max, unsigned k_min, bool primitive_only) {
  std::set<Key> out;
  // x^r y^s z^t >= (x^r)^3 and >= x^r (y^s)^2, so these loop bounds are loose
  const double eh = std::exp(h_max);
  for (unsigned long x = 2;; ++x) {
    if (std::pow(static_cast<double>(x), 3.0 * k_min) > eh) break;
    for (unsigned r = k_min;; ++r) {
      mpz_class xr = powz(x, r);
      const double lxr = std::log(xr.get_d());
      if (3 * lxr > h_max + 1) break;
      for (unsigned long y = 2;; ++y) {
        if (lxr + 2 * k_min * std::log(static_cast<double>(y)) > h_max + 1) break;
        for (unsigned s = k_min;; ++s) {
          mpz_class ys = powz(y, s);
          const double lys = std::log(ys.get_d());
          if (lxr + 2 * lys > h_max + 1) break;
          if (ys < xr) continue;
          mpz_class c = xr + ys;
          for (unsigned t = k_min; t <= mpz_sizeinbase(c.get_mpz_t(), 2); ++t) {
            mpz_class z;
            if (!mpz_root(z.get_mpz_t(), c.get_mpz_t(), t)) continue;
            mpz_class g = gcd(gcd(mpz_class(x), mpz_class(y)), z);
            if (primitive_only && g != 1) continue;
            if (lxr + lys + std::log(c.get_d()) < h_max) out.insert({mpz_class(x), r, mpz_class(y), s, z, t});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace effabc::oracle
