#include "fdeq/complexmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fdeq {

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(const std::vector<cpx>& d) {
  CMatrix m(int(d.size()), int(d.size()));
  for (int i = 0; i < int(d.size()); ++i) m(i, i) = d[i];
  return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(Errc::BadArgument, "matrix shape mismatch in +=");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(Errc::BadArgument, "matrix shape mismatch in -=");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cpx s) {
  for (auto& x : a_) x *= s;
  return *this;
}

CMatrix mul(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) fail(Errc::BadArgument, "matrix shape mismatch in mul");
  CMatrix c(a.rows(), b.cols());
  const int n = a.rows(), k = a.cols(), m = b.cols();
  // manual re/im accumulation keeps the inner loop free of NaN-handling branches
  const double* bp = reinterpret_cast<const double*>(b.data());
  double* cp = reinterpret_cast<double*>(c.data());
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < k; ++l) {
      const cpx ail = a(i, l);
      const double ar = ail.real(), ai = ail.imag();
      if (ar == 0.0 && ai == 0.0) continue;
      const double* brow = bp + size_t(l) * m * 2;
      double* crow = cp + size_t(i) * m * 2;
      for (int j = 0; j < m; ++j) {
        const double br = brow[2 * j], bi = brow[2 * j + 1];
        crow[2 * j] += ar * br - ai * bi;
        crow[2 * j + 1] += ar * bi + ai * br;
      }
    }
  }
  return c;
}

CMatrix adjoint(const CMatrix& a) {
  CMatrix r(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(j, i) = std::conj(a(i, j));
  return r;
}

CMatrix transpose(const CMatrix& a) {
  CMatrix r(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

double max_abs(const CMatrix& a) {
  double m = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

double herm_defect(const CMatrix& a) {
  if (!a.square()) fail(Errc::BadArgument, "herm_defect needs a square matrix");
  double m = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

bool all_finite(const CMatrix& a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

cpx trace(const CMatrix& a) {
  cpx t = 0;
  for (int i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

namespace {
constexpr double kPivotRel = 1e-13;
}

LuFactors lu_factor(CMatrix m) {
  if (!m.square()) fail(Errc::BadArgument, "lu_factor needs a square matrix");
  if (!all_finite(m)) fail(Errc::BadArgument, "non-finite entries in lu_factor input");
  const int n = m.rows();
  double row_norm = 0;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += std::abs(m(i, j));
    row_norm = std::max(row_norm, s);
  }
  const double thresh = kPivotRel * row_norm;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(m(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= thresh) fail(Errc::Singular, "pivot below threshold at column " + std::to_string(k));
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(perm[k], perm[piv]);
    }
    const cpx inv_piv = 1.0 / m(k, k);
    for (int i = k + 1; i < n; ++i) {
      const cpx f = m(i, k) * inv_piv;
      m(i, k) = f;
      if (f == 0.0) continue;
      const double fr = f.real(), fi = f.imag();
      const double* mk = reinterpret_cast<const double*>(&m(k, 0));
      double* mi = reinterpret_cast<double*>(&m(i, 0));
      for (int j = k + 1; j < n; ++j) {
        const double br = mk[2 * j], bi = mk[2 * j + 1];
        mi[2 * j] -= fr * br - fi * bi;
        mi[2 * j + 1] -= fr * bi + fi * br;
      }
    }
  }
  return LuFactors{std::move(m), std::move(perm)};
}

CMatrix lu_solve(const LuFactors& f, const CMatrix& rhs) {
  const int n = f.lu.rows();
  if (rhs.rows() != n) fail(Errc::BadArgument, "rhs shape mismatch in lu_solve");
  const int m = rhs.cols();
  CMatrix x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = rhs(f.perm[i], j);
  // forward
  for (int i = 1; i < n; ++i)
    for (int k = 0; k < i; ++k) {
      const cpx l = f.lu(i, k);
      if (l == 0.0) continue;
      for (int j = 0; j < m; ++j) x(i, j) -= l * x(k, j);
    }
  // backward
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) {
      const cpx u = f.lu(i, k);
      if (u == 0.0) continue;
      for (int j = 0; j < m; ++j) x(i, j) -= u * x(k, j);
    }
    const cpx d = 1.0 / f.lu(i, i);
    for (int j = 0; j < m; ++j) x(i, j) *= d;
  }
  return x;
}

CMatrix invert(const CMatrix& m) {
  return lu_solve(lu_factor(m), CMatrix::identity(m.rows()));
}

bool invert_small_inplace(cpx* a, int n, int* row_scratch) {
  // Gauss-Jordan with partial pivoting (rows), column bookkeeping for unwind
  double norm = 0;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += std::abs(a[i * n + j]);
    norm = std::max(norm, s);
  }
  const double thresh = kPivotRel * norm;

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(a[k * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a[i * n + k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best > thresh)) return false;
    row_scratch[k] = piv;
    if (piv != k)
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);

    const cpx pinv = 1.0 / a[k * n + k];
    a[k * n + k] = 1.0;
    for (int j = 0; j < n; ++j) a[k * n + j] *= pinv;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const cpx f = a[i * n + k];
      if (f == cpx(0.0)) continue;
      a[i * n + k] = 0.0;
      const double fr = f.real(), fi = f.imag();
      const double* ak = reinterpret_cast<const double*>(a + k * n);
      double* ai = reinterpret_cast<double*>(a + i * n);
      for (int j = 0; j < n; ++j) {
        const double br = ak[2 * j], bi = ak[2 * j + 1];
        ai[2 * j] -= fr * br - fi * bi;
        ai[2 * j + 1] -= fr * bi + fi * br;
      }
    }
  }
  // undo row swaps as column swaps of the inverse
  for (int k = n - 1; k >= 0; --k) {
    if (row_scratch[k] == k) continue;
    for (int i = 0; i < n; ++i) std::swap(a[i * n + k], a[i * n + row_scratch[k]]);
  }
  return true;
}

namespace {

// Householder reduction of a Hermitian matrix to real symmetric tridiagonal form.
// Produces d (diagonal), e (subdiagonal, e[0..n-2]) and, when wanted, the complex
// unitary Z with A = Z T Z^H.
void tridiagonalize(CMatrix a, std::vector<double>& d, std::vector<double>& e, CMatrix* z) {
  const int n = a.rows();
  d.assign(n, 0.0);
  e.assign(std::max(n - 1, 0), 0.0);

  struct Reflector {
    int k;
    std::vector<cpx> v;
    double tau;
  };
  std::vector<Reflector> refl;

  for (int k = 0; k + 2 < n; ++k) {
    const int len = n - k - 1;
    double xnorm2 = 0;
    for (int i = k + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) continue;
    const cpx alpha = a(k + 1, k);
    const double aabs = std::abs(alpha);
    const cpx phase = (aabs > 0) ? alpha / aabs : cpx(1.0);
    const cpx beta = -phase * xnorm;

    std::vector<cpx> v(len);
    v[0] = alpha - beta;
    for (int i = 1; i < len; ++i) v[i] = a(k + 1 + i, k);
    const double vv = 2.0 * xnorm * (xnorm + aabs);
    const double tau = 2.0 / vv;

    // two-sided update of the trailing block: B -= v w^H + w v^H
    std::vector<cpx> p(len, 0.0);
    for (int i = 0; i < len; ++i) {
      cpx s = 0;
      for (int j = 0; j < len; ++j) s += a(k + 1 + i, k + 1 + j) * v[j];
      p[i] = tau * s;
    }
    cpx vhp = 0;
    for (int i = 0; i < len; ++i) vhp += std::conj(v[i]) * p[i];
    const cpx half = 0.5 * tau * vhp;
    std::vector<cpx> w(len);
    for (int i = 0; i < len; ++i) w[i] = p[i] - half * v[i];
    for (int i = 0; i < len; ++i)
      for (int j = 0; j < len; ++j)
        a(k + 1 + i, k + 1 + j) -= v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]);

    a(k + 1, k) = beta;
    for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
    if (z) refl.push_back(Reflector{k, std::move(v), tau});
  }

  // absorb subdiagonal phases so the tridiagonal matrix is real
  std::vector<cpx> phases(n, cpx(1.0));
  for (int k = 0; k + 1 < n; ++k) {
    const cpx sub = a(k + 1, k);
    const double m = std::abs(sub);
    e[k] = m;
    if (m > 0)
      phases[k + 1] = phases[k] * (sub / m);
    else
      phases[k + 1] = phases[k];
  }
  for (int i = 0; i < n; ++i) d[i] = a(i, i).real();

  if (z) {
    *z = CMatrix::diagonal(phases);
    // Z = H_0 H_1 ... H_last * D, applied right-to-left
    for (auto it = refl.rbegin(); it != refl.rend(); ++it) {
      const int k = it->k;
      const int len = int(it->v.size());
      for (int col = 0; col < n; ++col) {
        cpx s = 0;
        for (int i = 0; i < len; ++i) s += std::conj(it->v[i]) * (*z)(k + 1 + i, col);
        s *= it->tau;
        if (s == 0.0) continue;
        for (int i = 0; i < len; ++i) (*z)(k + 1 + i, col) -= it->v[i] * s;
      }
    }
  }
}

// QL with implicit shifts on a real symmetric tridiagonal matrix; rotations are
// optionally accumulated into the complex basis z.
void tql2(std::vector<double>& d, std::vector<double>& e, CMatrix* z) {
  const int n = int(d.size());
  if (n <= 1) return;
  e.push_back(0.0); // sentinel

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) fail(Errc::NoConvergence, "tridiagonal QL exceeded 60 iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (int k = 0; k < n; ++k) {
              const cpx zk1 = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * zk1;
              (*z)(k, i) = c * (*z)(k, i) - s * zk1;
            }
          }
        }
        if (r == 0.0 && m - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

void check_hermitian(const CMatrix& m) {
  if (!m.square()) fail(Errc::BadArgument, "herm_eig needs a square matrix");
  if (!all_finite(m)) fail(Errc::BadArgument, "non-finite entries in herm_eig input");
  const double scale = std::max(1.0, max_abs(m));
  if (herm_defect(m) > 1e-12 * scale) fail(Errc::NotHermitian, "herm_defect exceeds 1e-12");
}

} // namespace

std::vector<double> herm_eig(const CMatrix& m) {
  check_hermitian(m);
  std::vector<double> d, e;
  tridiagonalize(m, d, e, nullptr);
  tql2(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

EigResult herm_eig_full(const CMatrix& m) {
  check_hermitian(m);
  std::vector<double> d, e;
  CMatrix z;
  tridiagonalize(m, d, e, &z);
  tql2(d, e, &z);
  // sort ascending, permuting columns alongside
  const int n = int(d.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
  EigResult r;
  r.values.resize(n);
  r.vectors = CMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    r.values[j] = d[idx[j]];
    for (int i = 0; i < n; ++i) r.vectors(i, j) = z(i, idx[j]);
  }
  return r;
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::BlockMismatch: return "BlockMismatch";
    case Errc::NotSelfAdjoint: return "NotSelfAdjoint";
    case Errc::UnknownSymbol: return "UnknownSymbol";
    case Errc::UnsupportedHaarUsage: return "UnsupportedHaarUsage";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnbalancedParens: return "UnbalancedParens";
    case Errc::MissingSection: return "MissingSection";
    case Errc::BadMatrixShape: return "BadMatrixShape";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::Singular: return "Singular";
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::TooLarge: return "TooLarge";
    case Errc::OddOrder: return "OddOrder";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::LeftHalfPlane: return "LeftHalfPlane";
    case Errc::BadArgument: return "BadArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

} // namespace fdeq
