#pragma once

#include <complex>
#include <vector>

#include "fdeq/error.hpp"

namespace fdeq {

using cpx = std::complex<double>;

/// Dense complex matrix, row-major.
class CMatrix {
public:
  CMatrix() = default;
  CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {
    if (rows < 0 || cols < 0) fail(Errc::BadArgument, "negative matrix dimension");
  }

  static CMatrix identity(int n);
  static CMatrix diagonal(const std::vector<cpx>& d);
  static CMatrix zero(int rows, int cols) { return CMatrix(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return a_.empty(); }

  cpx& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const cpx& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  cpx* data() { return a_.data(); }
  const cpx* data() const { return a_.data(); }

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cpx s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(cpx s, CMatrix a) { return a *= s; }

  bool operator==(const CMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<cpx> a_;
};

CMatrix mul(const CMatrix& a, const CMatrix& b);
CMatrix adjoint(const CMatrix& a);
CMatrix transpose(const CMatrix& a);

double max_abs(const CMatrix& a);
/// max |a - a*| over entries; 0 for the empty matrix.
double herm_defect(const CMatrix& a);
bool all_finite(const CMatrix& a);
cpx trace(const CMatrix& a);

/// In-place LU factorization with partial pivoting. Throws Errc::Singular when a
/// pivot falls below 1e-13 times the max row 1-norm of the input.
struct LuFactors {
  CMatrix lu;
  std::vector<int> perm; // row permutation
};
LuFactors lu_factor(CMatrix m);

/// Solve A x = rhs (rhs may have several columns).
CMatrix lu_solve(const LuFactors& f, const CMatrix& rhs);

/// Matrix inverse via LU. post: m * invert(m) = I within 1e-10 relative residual.
CMatrix invert(const CMatrix& m);

/// Allocation-free Gauss-Jordan inverse for small matrices; `a` is n x n
/// row-major and overwritten with its inverse. Returns false on a pivot below
/// the relative threshold. Scratch arrays must hold n ints each.
bool invert_small_inplace(cpx* a, int n, int* row_scratch);

/// Eigenvalues of a Hermitian matrix, ascending. pre: herm_defect(m) <= 1e-12 * scale.
std::vector<double> herm_eig(const CMatrix& m);

/// Eigenvalues and an orthonormal eigenvector basis (columns of `vectors`).
struct EigResult {
  std::vector<double> values;
  CMatrix vectors;
};
EigResult herm_eig_full(const CMatrix& m);

} // namespace fdeq
