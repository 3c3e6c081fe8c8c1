#include "loopiso/cyclo.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace loopiso {

Rat rat(long num, long den) {
  require(den != 0, "DivisionByZero", "rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      Rat r(s);
      r.canonicalize();
      return r;
    }
    Rat r(s.substr(0, slash) + "/" + s.substr(slash + 1));
    r.canonicalize();
    require(r.get_den() != 0, "BadRational", s);
    return r;
  } catch (const std::invalid_argument&) {
    fail("BadRational", "cannot parse rational: " + s);
  }
}

std::string rat_to_string(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

long gcd_long(long a, long b) { return std::gcd(a, b); }

long lcm_long(long a, long b) {
  if (a == 0 || b == 0) return 0;
  long g = std::gcd(a, b);
  long l = a / g;
  require(l <= kMaxLevel / b, "ScalarLevelOverflow",
          "lcm(" + std::to_string(a) + "," + std::to_string(b) + ") too large");
  return l * b;
}

long phi_of(long n) {
  require(n >= 1, "BadLevel", "phi of nonpositive");
  long result = n, m = n;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      result -= result / p;
      while (m % p == 0) m /= p;
    }
  }
  if (m > 1) result -= result / m;
  return result;
}

std::vector<long> divisors_of(long n) {
  std::vector<long> ds;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      ds.push_back(d);
      if (d != n / d) ds.push_back(n / d);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

// ----- dense polynomial helpers over Q, ascending powers -----

namespace {

void poly_trim(std::vector<Rat>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

std::vector<Rat> poly_mul(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Rat> c(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      c[i + j] += a[i] * b[j];
    }
  }
  poly_trim(c);
  return c;
}

// quotient of a by b; remainder must come out zero when exact==true
std::vector<Rat> poly_div_exact(std::vector<Rat> a, const std::vector<Rat>& b) {
  poly_trim(a);
  std::vector<Rat> q;
  require(!b.empty(), "DivisionByZero", "poly division by zero");
  if (a.size() < b.size()) {
    require(a.empty(), "InternalError", "inexact polynomial division");
    return {};
  }
  q.assign(a.size() - b.size() + 1, Rat(0));
  const Rat lead = b.back();
  for (long d = (long)a.size() - 1; d >= (long)b.size() - 1; --d) {
    if (a[d] == 0) continue;
    Rat t = a[d] / lead;
    q[d - (b.size() - 1)] = t;
    for (size_t i = 0; i < b.size(); ++i) a[d - (b.size() - 1) + i] -= t * b[i];
  }
  poly_trim(a);
  require(a.empty(), "InternalError", "inexact polynomial division");
  return q;
}

// reduce p in place modulo the monic polynomial f
void poly_mod_monic(std::vector<Rat>& p, const std::vector<Rat>& f) {
  const size_t deg = f.size() - 1;
  while (p.size() > deg) {
    Rat t = p.back();
    p.pop_back();
    if (t == 0) continue;
    const size_t off = p.size() - deg;
    for (size_t i = 0; i < deg; ++i) p[off + i] -= t * f[i];
  }
  poly_trim(p);
}

std::mutex g_cyclo_mutex;
std::map<long, std::vector<Rat>> g_cyclo_cache;

std::vector<Rat> cyclotomic_poly_nolock(long n) {
  auto it = g_cyclo_cache.find(n);
  if (it != g_cyclo_cache.end()) return it->second;
  std::vector<Rat> value;
  if (n == 1) {
    value = {Rat(-1), Rat(1)};  // x - 1
  } else {
    std::vector<Rat> xn1(n + 1, Rat(0));  // x^n - 1
    xn1[0] = -1;
    xn1[n] = 1;
    std::vector<Rat> denom = {Rat(1)};
    for (long d : divisors_of(n)) {
      if (d == n) continue;
      denom = poly_mul(denom, cyclotomic_poly_nolock(d));
    }
    value = poly_div_exact(xn1, denom);
  }
  g_cyclo_cache.emplace(n, value);
  return value;
}

}  // namespace

const std::vector<Rat>& cyclotomic_poly(long n) {
  require(n >= 1 && n <= kMaxLevel, "BadLevel",
          "cyclotomic level out of range: " + std::to_string(n));
  std::lock_guard<std::mutex> lock(g_cyclo_mutex);
  cyclotomic_poly_nolock(n);
  return g_cyclo_cache[n];
}

// ----- CycNum -----

CycNum::CycNum() : level_(1), c_(1, Rat(0)) {}

CycNum::CycNum(Rat r) : level_(1), c_(1, std::move(r)) {}

CycNum::CycNum(long v) : level_(1), c_(1, Rat(v)) {}

CycNum CycNum::zeta(long m) { return zeta_pow(m, 1); }

CycNum CycNum::zeta_pow(long m, long long k) {
  require(m >= 1, "BadLevel", "zeta level must be positive");
  long kk = (long)(((k % m) + m) % m);
  std::vector<Rat> p(kk + 1, Rat(0));
  p[kk] = 1;
  poly_mod_monic(p, cyclotomic_poly(m));
  p.resize(phi_of(m), Rat(0));
  CycNum z;
  z.level_ = m;
  z.c_ = std::move(p);
  return z;
}

CycNum CycNum::from_coords(long level, std::vector<Rat> coords) {
  require(level >= 1, "BadLevel", "level must be positive");
  require((long)coords.size() == phi_of(level), "BadCoords",
          "coordinate length must equal phi(level)");
  CycNum z;
  z.level_ = level;
  z.c_ = std::move(coords);
  return z;
}

CycNum CycNum::at_level(long n) const {
  require(n >= 1 && n % level_ == 0, "BadLevel",
          "embedding requires current level to divide target");
  if (n == level_) return *this;
  const long e = n / level_;
  std::vector<Rat> p((c_.size() - 1) * e + 1, Rat(0));
  for (size_t k = 0; k < c_.size(); ++k) p[k * e] = c_[k];
  poly_mod_monic(p, cyclotomic_poly(n));
  p.resize(phi_of(n), Rat(0));
  CycNum z;
  z.level_ = n;
  z.c_ = std::move(p);
  return z;
}

std::optional<CycNum> CycNum::try_to_level(long m) const {
  require(m >= 1 && level_ % m == 0, "BadLevel",
          "projection requires target level to divide current");
  if (m == level_) return *this;
  const long dn = phi_of(level_), dm = phi_of(m);
  // columns: zeta_m^j embedded at this level, j = 0..dm-1
  std::vector<std::vector<Rat>> aug(dn, std::vector<Rat>(dm + 1, Rat(0)));
  for (long j = 0; j < dm; ++j) {
    CycNum col = zeta_pow(m, j).at_level(level_);
    for (long i = 0; i < dn; ++i) aug[i][j] = col.c_[i];
  }
  for (long i = 0; i < dn; ++i) aug[i][dm] = c_[i];
  // gaussian elimination on the augmented system
  long row = 0;
  std::vector<long> pivot_col;
  for (long col = 0; col < dm && row < dn; ++col) {
    long pr = -1;
    for (long r = row; r < dn; ++r)
      if (aug[r][col] != 0) { pr = r; break; }
    if (pr < 0) continue;
    std::swap(aug[row], aug[pr]);
    Rat inv = 1 / aug[row][col];
    for (long j = col; j <= dm; ++j) aug[row][j] *= inv;
    for (long r = 0; r < dn; ++r) {
      if (r == row || aug[r][col] == 0) continue;
      Rat f = aug[r][col];
      for (long j = col; j <= dm; ++j) aug[r][j] -= f * aug[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (long r = row; r < dn; ++r)
    if (aug[r][dm] != 0) return std::nullopt;  // inconsistent: not in subfield
  std::vector<Rat> sol(dm, Rat(0));
  for (long r = 0; r < (long)pivot_col.size(); ++r) sol[pivot_col[r]] = aug[r][dm];
  return from_coords(m, std::move(sol));
}

long CycNum::minimal_level() const {
  for (long d : divisors_of(level_)) {
    if (try_to_level(d)) return d;
  }
  return level_;
}

CycNum CycNum::reduced() const { return *try_to_level(minimal_level()); }

bool CycNum::is_zero() const {
  for (const auto& x : c_)
    if (x != 0) return false;
  return true;
}

bool CycNum::is_rational() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

Rat CycNum::to_rational() const {
  require(is_rational(), "NotRational", "element is not rational");
  return c_[0];
}

CycNum CycNum::operator-() const {
  CycNum z = *this;
  for (auto& x : z.c_) x = -x;
  return z;
}

long level_join(CycNum& a, CycNum& b) {
  long n = lcm_long(a.level(), b.level());
  a = a.at_level(n);
  b = b.at_level(n);
  return n;
}

CycNum operator+(const CycNum& a, const CycNum& b) {
  CycNum x = a, y = b;
  level_join(x, y);
  for (size_t i = 0; i < x.c_.size(); ++i) x.c_[i] += y.c_[i];
  return x;
}

CycNum operator-(const CycNum& a, const CycNum& b) { return a + (-b); }

CycNum operator*(const CycNum& a, const CycNum& b) {
  CycNum x = a, y = b;
  long n = level_join(x, y);
  std::vector<Rat> p = poly_mul(x.c_, y.c_);
  poly_mod_monic(p, cyclotomic_poly(n));
  p.resize(phi_of(n), Rat(0));
  CycNum z;
  z = CycNum::from_coords(n, std::move(p));
  return z;
}

CycNum& CycNum::operator+=(const CycNum& b) { return *this = *this + b; }
CycNum& CycNum::operator-=(const CycNum& b) { return *this = *this - b; }
CycNum& CycNum::operator*=(const CycNum& b) { return *this = *this * b; }

CycNum CycNum::inverse() const {
  require(!is_zero(), "DivisionByZero", "inverse of zero");
  if (is_rational()) return CycNum(Rat(1) / c_[0]);
  // extended euclid: u*f + v*Phi = gcd; f invertible mod Phi since Phi is
  // irreducible and f != 0
  std::vector<Rat> r0 = cyclotomic_poly(level_), r1 = c_;
  poly_trim(r1);
  std::vector<Rat> s0 = {}, s1 = {Rat(1)};  // coefficients of f
  while (!r1.empty()) {
    // divide r0 by r1
    std::vector<Rat> q;
    std::vector<Rat> rem = r0;
    const Rat lead = r1.back();
    if (rem.size() >= r1.size()) {
      q.assign(rem.size() - r1.size() + 1, Rat(0));
      for (long d = (long)rem.size() - 1; d >= (long)r1.size() - 1; --d) {
        if (rem[d] == 0) continue;
        Rat t = rem[d] / lead;
        q[d - (r1.size() - 1)] = t;
        for (size_t i = 0; i < r1.size(); ++i)
          rem[d - (r1.size() - 1) + i] -= t * r1[i];
      }
      poly_trim(rem);
    }
    // (r0, r1) <- (r1, rem); (s0, s1) <- (s1, s0 - q*s1)
    std::vector<Rat> qs1 = poly_mul(q, s1);
    std::vector<Rat> s2 = s0;
    if (s2.size() < qs1.size()) s2.resize(qs1.size(), Rat(0));
    for (size_t i = 0; i < qs1.size(); ++i) s2[i] -= qs1[i];
    poly_trim(s2);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r0 = gcd (nonzero constant times unit); inverse = s0 / r0
  require(r0.size() == 1, "InternalError", "cyclotomic polynomial not coprime");
  std::vector<Rat> inv = s0;
  for (auto& x : inv) x /= r0[0];
  poly_mod_monic(inv, cyclotomic_poly(level_));
  inv.resize(phi_of(level_), Rat(0));
  return from_coords(level_, std::move(inv));
}

CycNum operator/(const CycNum& a, const CycNum& b) { return a * b.inverse(); }

CycNum CycNum::pow(long long k) const {
  if (k < 0) return inverse().pow(-k);
  CycNum acc(Rat(1));
  CycNum base = *this;
  unsigned long long e = (unsigned long long)k;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

bool CycNum::operator==(const CycNum& b) const {
  CycNum x = *this, y = b;
  level_join(x, y);
  return x.c_ == y.c_;
}

std::optional<std::pair<long, long>> CycNum::as_root_of_unity() const {
  if (is_zero()) return std::nullopt;
  const long bound = 2 * level_;
  CycNum p = *this;
  const CycNum one(1);
  for (long s = 1; s <= bound; ++s) {
    if (p == one) {
      // order is s; find exponent
      CycNum z = zeta(s), q = one;
      for (long k = 0; k < s; ++k) {
        if (q == *this) return std::make_pair(s, k);
        q = q * z;
      }
      return std::nullopt;  // unreachable if order is right
    }
    p = p * *this;
  }
  return std::nullopt;
}

std::string CycNum::str() const {
  std::ostringstream os;
  os << "cyc(" << level_ << ";";
  for (size_t i = 0; i < c_.size(); ++i) os << (i ? "," : " ") << c_[i];
  os << ")";
  return os.str();
}

}  // namespace loopiso
