#pragma once

#include <optional>
#include <vector>

#include "loopiso/cyclo.hpp"

namespace loopiso {

using CycVec = std::vector<CycNum>;

// Dense matrix over Q(zeta_N), row-major. Entries may sit at mixed levels;
// operations join levels as needed.
class Mat {
public:
  Mat() : nr_(0), nc_(0) {}
  Mat(long rows, long cols) : nr_(rows), nc_(cols), a_(rows * cols) {}

  static Mat identity(long n);

  long rows() const { return nr_; }
  long cols() const { return nc_; }
  CycNum& at(long r, long c) { return a_[r * nc_ + c]; }
  const CycNum& at(long r, long c) const { return a_[r * nc_ + c]; }

  Mat operator*(const Mat& b) const;
  Mat operator+(const Mat& b) const;
  Mat operator-(const Mat& b) const;
  Mat scaled(const CycNum& s) const;
  CycVec apply(const CycVec& v) const;  // this * column vector
  Mat transpose() const;
  bool operator==(const Mat& b) const;
  bool is_zero() const;
  Mat power(long k) const;  // k >= 0

private:
  long nr_, nc_;
  std::vector<CycNum> a_;
};

CycVec vec_add(const CycVec& a, const CycVec& b);
CycVec vec_sub(const CycVec& a, const CycVec& b);
CycVec vec_scaled(const CycVec& a, const CycNum& s);
bool vec_is_zero(const CycVec& a);

// Row echelon reduction in place; returns pivot column indices.
std::vector<long> rref(Mat& m);
long rank_of(Mat m);
CycNum det(Mat m);

// Basis of the right null space {x : A x = 0}.
std::vector<CycVec> nullspace(const Mat& a);

// One solution of A x = b, if consistent.
std::optional<CycVec> solve(const Mat& a, const CycVec& b);

std::optional<Mat> inverse(const Mat& a);

// Coordinates of v in the span of the given basis vectors, if it lies there.
std::optional<CycVec> coords_in_span(const std::vector<CycVec>& basis,
                                     const CycVec& v);

// ----- integer matrices -----

using IMat = std::vector<std::vector<long>>;  // row-major, rectangular

// Smith normal form: returns (U, D, V) with U*A*V = D, U and V unimodular,
// D diagonal (as a rectangular matrix with diagonal entries d[i]).
struct SmithForm {
  IMat u, v;
  std::vector<long> d;  // length min(rows, cols)
};
SmithForm smith_form(IMat a);

// One solution x of A x == c (mod modulus), if any.
std::optional<std::vector<long>> solve_mod(const IMat& a,
                                           const std::vector<long>& c,
                                           long modulus);

}  // namespace loopiso
