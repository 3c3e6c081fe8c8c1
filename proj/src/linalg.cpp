#include "loopiso/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace loopiso {

Mat Mat::identity(long n) {
  Mat m(n, n);
  for (long i = 0; i < n; ++i) m.at(i, i) = CycNum(1);
  return m;
}

Mat Mat::operator*(const Mat& b) const {
  require(nc_ == b.nr_, "ShapeMismatch", "matrix product shapes");
  Mat c(nr_, b.nc_);
  for (long i = 0; i < nr_; ++i)
    for (long k = 0; k < nc_; ++k) {
      const CycNum& x = at(i, k);
      if (x.is_zero()) continue;
      for (long j = 0; j < b.nc_; ++j) {
        if (b.at(k, j).is_zero()) continue;
        c.at(i, j) += x * b.at(k, j);
      }
    }
  return c;
}

Mat Mat::operator+(const Mat& b) const {
  require(nr_ == b.nr_ && nc_ == b.nc_, "ShapeMismatch", "matrix sum shapes");
  Mat c(nr_, nc_);
  for (long i = 0; i < nr_ * nc_; ++i) c.a_[i] = a_[i] + b.a_[i];
  return c;
}

Mat Mat::operator-(const Mat& b) const {
  require(nr_ == b.nr_ && nc_ == b.nc_, "ShapeMismatch", "matrix diff shapes");
  Mat c(nr_, nc_);
  for (long i = 0; i < nr_ * nc_; ++i) c.a_[i] = a_[i] - b.a_[i];
  return c;
}

Mat Mat::scaled(const CycNum& s) const {
  Mat c(nr_, nc_);
  for (long i = 0; i < nr_ * nc_; ++i) c.a_[i] = a_[i] * s;
  return c;
}

CycVec Mat::apply(const CycVec& v) const {
  require((long)v.size() == nc_, "ShapeMismatch", "matrix apply shape");
  CycVec out(nr_);
  for (long i = 0; i < nr_; ++i)
    for (long j = 0; j < nc_; ++j) {
      if (at(i, j).is_zero() || v[j].is_zero()) continue;
      out[i] += at(i, j) * v[j];
    }
  return out;
}

Mat Mat::transpose() const {
  Mat t(nc_, nr_);
  for (long i = 0; i < nr_; ++i)
    for (long j = 0; j < nc_; ++j) t.at(j, i) = at(i, j);
  return t;
}

bool Mat::operator==(const Mat& b) const {
  if (nr_ != b.nr_ || nc_ != b.nc_) return false;
  for (long i = 0; i < nr_ * nc_; ++i)
    if (!(a_[i] == b.a_[i])) return false;
  return true;
}

bool Mat::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

Mat Mat::power(long k) const {
  require(nr_ == nc_, "ShapeMismatch", "power of non-square matrix");
  require(k >= 0, "BadArgument", "negative matrix power");
  Mat acc = identity(nr_);
  Mat base = *this;
  while (k) {
    if (k & 1) acc = acc * base;
    base = base * base;
    k >>= 1;
  }
  return acc;
}

CycVec vec_add(const CycVec& a, const CycVec& b) {
  require(a.size() == b.size(), "ShapeMismatch", "vector sum");
  CycVec c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

CycVec vec_sub(const CycVec& a, const CycVec& b) {
  require(a.size() == b.size(), "ShapeMismatch", "vector diff");
  CycVec c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

CycVec vec_scaled(const CycVec& a, const CycNum& s) {
  CycVec c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] * s;
  return c;
}

bool vec_is_zero(const CycVec& a) {
  for (const auto& x : a)
    if (!x.is_zero()) return false;
  return true;
}

std::vector<long> rref(Mat& m) {
  std::vector<long> pivots;
  long row = 0;
  for (long col = 0; col < m.cols() && row < m.rows(); ++col) {
    long pr = -1;
    for (long r = row; r < m.rows(); ++r)
      if (!m.at(r, col).is_zero()) { pr = r; break; }
    if (pr < 0) continue;
    if (pr != row)
      for (long j = 0; j < m.cols(); ++j) std::swap(m.at(row, j), m.at(pr, j));
    CycNum inv = m.at(row, col).inverse();
    for (long j = col; j < m.cols(); ++j) m.at(row, j) = m.at(row, j) * inv;
    for (long r = 0; r < m.rows(); ++r) {
      if (r == row || m.at(r, col).is_zero()) continue;
      CycNum f = m.at(r, col);
      for (long j = col; j < m.cols(); ++j)
        m.at(r, j) = m.at(r, j) - f * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

long rank_of(Mat m) { return (long)rref(m).size(); }

CycNum det(Mat m) {
  require(m.rows() == m.cols(), "ShapeMismatch", "determinant of non-square");
  CycNum d(1);
  long n = m.rows();
  for (long col = 0; col < n; ++col) {
    long pr = -1;
    for (long r = col; r < n; ++r)
      if (!m.at(r, col).is_zero()) { pr = r; break; }
    if (pr < 0) return CycNum(0);
    if (pr != col) {
      for (long j = 0; j < n; ++j) std::swap(m.at(col, j), m.at(pr, j));
      d = -d;
    }
    d = d * m.at(col, col);
    CycNum inv = m.at(col, col).inverse();
    for (long r = col + 1; r < n; ++r) {
      if (m.at(r, col).is_zero()) continue;
      CycNum f = m.at(r, col) * inv;
      for (long j = col; j < n; ++j) m.at(r, j) = m.at(r, j) - f * m.at(col, j);
    }
  }
  return d;
}

std::vector<CycVec> nullspace(const Mat& a) {
  Mat m = a;
  std::vector<long> pivots = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (long p : pivots) is_pivot[p] = true;
  std::vector<CycVec> basis;
  for (long free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    CycVec v(m.cols());
    v[free] = CycNum(1);
    for (size_t r = 0; r < pivots.size(); ++r)
      v[pivots[r]] = -m.at((long)r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<CycVec> solve(const Mat& a, const CycVec& b) {
  require((long)b.size() == a.rows(), "ShapeMismatch", "solve shape");
  Mat aug(a.rows(), a.cols() + 1);
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i];
  }
  std::vector<long> pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  CycVec x(a.cols());
  for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at((long)r, a.cols());
  return x;
}

std::optional<Mat> inverse(const Mat& a) {
  require(a.rows() == a.cols(), "ShapeMismatch", "inverse of non-square");
  long n = a.rows();
  Mat aug(n, 2 * n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, n + i) = CycNum(1);
  }
  std::vector<long> pivots = rref(aug);
  if ((long)pivots.size() != n || pivots[n - 1] != n - 1) return std::nullopt;
  Mat inv(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
  return inv;
}

std::optional<CycVec> coords_in_span(const std::vector<CycVec>& basis,
                                     const CycVec& v) {
  if (basis.empty()) return vec_is_zero(v) ? std::make_optional(CycVec{}) : std::nullopt;
  Mat m((long)basis[0].size(), (long)basis.size());
  for (size_t j = 0; j < basis.size(); ++j) {
    require(basis[j].size() == basis[0].size(), "ShapeMismatch", "span basis");
    for (size_t i = 0; i < basis[j].size(); ++i) m.at((long)i, (long)j) = basis[j][i];
  }
  return solve(m, v);
}

// ----- integer Smith form -----

namespace {

void irow_swap(IMat& m, long a, long b) { std::swap(m[a], m[b]); }
void icol_swap(IMat& m, long a, long b) {
  for (auto& row : m) std::swap(row[a], row[b]);
}
void irow_addmul(IMat& m, long dst, long src, long f) {
  for (size_t j = 0; j < m[dst].size(); ++j) m[dst][j] += f * m[src][j];
}
void icol_addmul(IMat& m, long dst, long src, long f) {
  for (auto& row : m) row[dst] += f * row[src];
}
void irow_neg(IMat& m, long r) {
  for (auto& x : m[r]) x = -x;
}
void icol_neg(IMat& m, long c) {
  for (auto& row : m) row[c] = -row[c];
}

}  // namespace

SmithForm smith_form(IMat a) {
  const long nr = (long)a.size();
  const long nc = nr ? (long)a[0].size() : 0;
  SmithForm sf;
  sf.u.assign(nr, std::vector<long>(nr, 0));
  sf.v.assign(nc, std::vector<long>(nc, 0));
  for (long i = 0; i < nr; ++i) sf.u[i][i] = 1;
  for (long j = 0; j < nc; ++j) sf.v[j][j] = 1;

  long t = 0;
  const long tmax = std::min(nr, nc);
  while (t < tmax) {
    // find nonzero pivot with smallest absolute value in trailing block
    long pr = -1, pc = -1;
    long best = 0;
    for (long i = t; i < nr; ++i)
      for (long j = t; j < nc; ++j)
        if (a[i][j] != 0 && (pr < 0 || std::abs(a[i][j]) < best)) {
          pr = i; pc = j; best = std::abs(a[i][j]);
        }
    if (pr < 0) break;
    if (pr != t) { irow_swap(a, t, pr); irow_swap(sf.u, t, pr); }
    if (pc != t) { icol_swap(a, t, pc); icol_swap(sf.v, t, pc); }
    bool clean = true;
    for (long i = t + 1; i < nr; ++i) {
      if (a[i][t] == 0) continue;
      long f = -(a[i][t] / a[t][t]);
      irow_addmul(a, i, t, f);
      irow_addmul(sf.u, i, t, f);
      if (a[i][t] != 0) clean = false;
    }
    for (long j = t + 1; j < nc; ++j) {
      if (a[t][j] == 0) continue;
      long f = -(a[t][j] / a[t][t]);
      icol_addmul(a, j, t, f);
      icol_addmul(sf.v, j, t, f);
      if (a[t][j] != 0) clean = false;
    }
    if (!clean) continue;  // remainders left; pick a smaller pivot next pass
    // divisibility condition: a[t][t] must divide the trailing block
    bool fixed = false;
    for (long i = t + 1; i < nr && !fixed; ++i)
      for (long j = t + 1; j < nc && !fixed; ++j)
        if (a[i][j] % a[t][t] != 0) {
          irow_addmul(a, t, i, 1);
          irow_addmul(sf.u, t, i, 1);
          fixed = true;
        }
    if (fixed) continue;
    if (a[t][t] < 0) { irow_neg(a, t); irow_neg(sf.u, t); }
    ++t;
  }
  sf.d.assign(tmax, 0);
  for (long i = 0; i < tmax; ++i) sf.d[i] = a[i][i];
  return sf;
}

namespace {

long mod_norm(long x, long m) {
  long r = x % m;
  return r < 0 ? r + m : r;
}

// extended gcd: returns g, sets x with a*x == g (mod m0) context handled by caller
long egcd(long a, long b, long& x, long& y) {
  if (b == 0) { x = 1; y = 0; return a; }
  long x1, y1;
  long g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

}  // namespace

std::optional<std::vector<long>> solve_mod(const IMat& a,
                                           const std::vector<long>& c,
                                           long modulus) {
  require(modulus >= 1, "BadArgument", "modulus must be positive");
  const long nr = (long)a.size();
  const long nc = nr ? (long)a[0].size() : 0;
  require((long)c.size() == nr, "ShapeMismatch", "solve_mod shape");
  SmithForm sf = smith_form(a);
  // y solves D y == U c (mod M); then x = V y
  std::vector<long> uc(nr, 0);
  for (long i = 0; i < nr; ++i) {
    long s = 0;
    for (long j = 0; j < nr; ++j) s += sf.u[i][j] * c[j];
    uc[i] = mod_norm(s, modulus);
  }
  std::vector<long> y(nc, 0);
  const long tmax = std::min(nr, nc);
  for (long i = 0; i < nr; ++i) {
    long di = i < tmax ? sf.d[i] : 0;
    if (di == 0) {
      if (uc[i] % modulus != 0) return std::nullopt;
      continue;
    }
    long x0, y0;
    long g = egcd(mod_norm(di, modulus) == 0 ? modulus : mod_norm(di, modulus),
                  modulus, x0, y0);
    if (uc[i] % g != 0) return std::nullopt;
    long m2 = modulus / g;
    long sol = mod_norm((uc[i] / g) % m2 * mod_norm(x0, m2) % m2, m2);
    y[i] = sol;
  }
  std::vector<long> x(nc, 0);
  for (long i = 0; i < nc; ++i) {
    long s = 0;
    for (long j = 0; j < nc; ++j) s += sf.v[i][j] * y[j];
    x[i] = mod_norm(s, modulus);
  }
  return x;
}

}  // namespace loopiso
