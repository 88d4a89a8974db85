#pragma once

#include <memory>

#include "fdeq/linearize.hpp"
#include "fdeq/quadrature.hpp"

namespace fdeq {

/// Element of M_m (x) span{P_0..P_k}, stored block-factored: one m x m matrix
/// per projection.
struct BElement {
  std::vector<CMatrix> blocks;

  int m() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  int block_count() const { return int(blocks.size()); }

  BElement& operator+=(const BElement& o);
  BElement& operator-=(const BElement& o);
  BElement& operator*=(cpx s);
  friend BElement operator+(BElement a, const BElement& b) { return a += b; }
  friend BElement operator-(BElement a, const BElement& b) { return a -= b; }
};

BElement zero_b(int m, int nblocks);

/// Lambda_eps(z): every block carries diag(z, i eps, ..., i eps).
BElement lambda_embed(cpx z, double eps, int m, int nblocks);

/// Blockwise inverse.
BElement inverse_b(const BElement& b);

double max_norm(const BElement& b);
double max_diff(const BElement& a, const BElement& b);

/// Smallest eigenvalue of Im(b) = (b - b*)/(2i) across blocks.
struct HalfPlaneCert {
  double min_im = 0;
  bool upper() const { return min_im > 0; }
};
HalfPlaneCert half_plane_cert(const BElement& b);

/// Cheap check that min_im(b) >= -tol (Gershgorin first, eigenvalues on demand).
bool in_upper_closure(const BElement& b, double tol);

/// h(b) = G^{-1} - b given G = G(b).
BElement h_transform(const BElement& g, const BElement& b);

/// Cauchy-transform evaluator of one free summand (or a convolution of them).
class CauchyEval {
public:
  virtual ~CauchyEval() = default;
  virtual BElement cauchy(const BElement& b) = 0;
  BElement htrans(const BElement& b) { return h_transform(cauchy(b), b); }
  virtual long iterations_used() const { return 0; }
  /// Accuracy hint from an enclosing fixed point: early iterations tolerate a
  /// looser transform, the final ones need full precision. Default: ignore.
  virtual void set_accuracy(double) {}
};

/// G of a deterministic summand: expand b to the full frame, invert
/// (b_hat - L_det), apply the block trace cellwise. A spectral fast path runs
/// when the cells reference at most one distinct Hermitian block matrix.
class DetEval : public CauchyEval {
public:
  DetEval(const FreeSummand& part, const RectSpace& space, int m);
  BElement cauchy(const BElement& b) override;
  bool fast_path() const { return fast_; }

private:
  BElement cauchy_general(const BElement& b) const;
  BElement cauchy_spectral(const BElement& b) const;

  RectSpace space_;
  int m_;
  CMatrix assembled_;
  // spectral path data
  bool fast_ = false;
  std::vector<std::vector<cpx>> proj_coeff_; // cell (i,j) -> per-block scalar
  CMatrix pattern_;                          // m x m coefficients of the Hermitian matrix
  int mat_block_ = -1;                       // block carrying the matrix (-1: none)
  std::vector<double> mat_eigs_;
};

/// G of scale * (D (x) s) with s standard semicircular on `block`: the
/// projection algebra is commutative, so each quadrature node inverts one
/// m x m matrix per block. When the argument comes closer to the support than
/// the configured rule can resolve (pole distance below ~10/n), the rule is
/// refined geometrically for that evaluation; refinements are cached.
class SemiEval : public CauchyEval {
public:
  SemiEval(const FreeSummand& part, const QuadratureRule& rule, int nblocks);
  BElement cauchy(const BElement& b) override;
  int last_rule_order() const { return last_order_; }
  void set_accuracy(double a) override;

private:
  const QuadratureRule& rule_at(int n);
  CMatrix integrate(const CMatrix& arg, const QuadratureRule& rule) const;

  CMatrix coeff_;
  int block_;
  double scale_;
  QuadratureRule rule_;
  int nblocks_;
  double coeff_norm_ = 0;
  bool midpoint_ = false;
  int last_order_ = 0;
  int cruise_ = 0;          // refinement level carried between evaluations
  double accuracy_ = 1e-11; // ladder agreement tolerance
};

/// Convenience wrappers matching the summand kinds.
std::unique_ptr<CauchyEval> make_eval(const FreeSummand& part, const RectSpace& space, int m,
                                      const QuadratureRule& rule);

/// Free functions mirroring the evaluator paths (used by tests).
BElement cauchy_det(const FreeSummand& part, const RectSpace& space, int m, const BElement& b);
BElement cauchy_semi(const FreeSummand& part, const BElement& b, const QuadratureRule& rule);

} // namespace fdeq
