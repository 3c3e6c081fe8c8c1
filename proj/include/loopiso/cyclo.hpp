#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loopiso/errors.hpp"

namespace loopiso {

using Rat = mpq_class;

Rat rat(long num, long den = 1);
Rat rat_from_string(const std::string& s);  // accepts "p" or "p/q"
std::string rat_to_string(const Rat& r);

long gcd_long(long a, long b);
long lcm_long(long a, long b);
long phi_of(long n);
std::vector<long> divisors_of(long n);

// Coefficients of the n-th cyclotomic polynomial, ascending powers,
// length phi(n)+1, monic, integer entries.
const std::vector<Rat>& cyclotomic_poly(long n);

// Element of Q(zeta_N) in the power basis of z := x mod Phi_N.
// zeta_m at any ambient level N with m | N is z^(N/m); with that convention
// the whole tower is compatible: zeta(l*m)^l = zeta(m).
class CycNum {
public:
  CycNum();                // zero at level 1
  explicit CycNum(Rat r);  // rational at level 1
  CycNum(long v);

  static CycNum zeta(long m);
  static CycNum zeta_pow(long m, long long k);
  static CycNum from_coords(long level, std::vector<Rat> coords);

  long level() const { return level_; }
  const std::vector<Rat>& coords() const { return c_; }

  CycNum at_level(long n) const;                    // embed; requires level|n
  std::optional<CycNum> try_to_level(long m) const; // project; requires m|level
  long minimal_level() const;
  CycNum reduced() const;  // re-expressed at minimal level

  bool is_zero() const;
  bool is_rational() const;
  Rat to_rational() const;

  CycNum operator-() const;
  CycNum inverse() const;
  CycNum pow(long long k) const;

  friend CycNum operator+(const CycNum& a, const CycNum& b);
  friend CycNum operator-(const CycNum& a, const CycNum& b);
  friend CycNum operator*(const CycNum& a, const CycNum& b);
  friend CycNum operator/(const CycNum& a, const CycNum& b);
  CycNum& operator+=(const CycNum& b);
  CycNum& operator-=(const CycNum& b);
  CycNum& operator*=(const CycNum& b);

  bool operator==(const CycNum& b) const;
  bool operator!=(const CycNum& b) const { return !(*this == b); }

  // If this is a root of unity, returns (order, exponent) with
  // this == zeta(order)^exponent and 0 <= exponent < order, gcd(exp,order)
  // not necessarily 1; order is the exact multiplicative order.
  std::optional<std::pair<long, long>> as_root_of_unity() const;

  std::string str() const;

private:
  long level_;
  std::vector<Rat> c_;  // length phi(level_)
};

// Promotes both to the joined level (lcm); returns that level.
long level_join(CycNum& a, CycNum& b);

// Guard against runaway tower growth.
inline constexpr long kMaxLevel = 1000000;

}  // namespace loopiso
