#pragma once

#include <optional>

#include "fdeq/transforms.hpp"

namespace fdeq {

struct FixedPointConfig {
  double tol = 1e-10;
  int max_iter = 10000;
  double damping = 1.0; // 1 = undamped
};

struct ConvolutionReport {
  long iterations = 0;  // fixed-point steps, all nesting levels
  double residual = 0;  // ||f_b(w) - w|| at the outermost solve
  BElement subordinator; // omega at the outermost solve
};

/// Free additive convolution at one point b via the subordination iterate
/// w <- (1-theta) w + theta (h_y(h_x(w) + b) + b), starting from w0 (b when
/// empty). Returns G_x(omega) = G_{x+y}(b).
BElement free_add(CauchyEval& gx, CauchyEval& gy, const BElement& b, const FixedPointConfig& cfg,
                  ConvolutionReport* report = nullptr, const BElement* w0 = nullptr);

/// Nested evaluator for folds of three or more summands. Warm-starts its
/// internal subordination from the previous converged omega; instances are
/// per-evaluation-point, so results stay deterministic.
class FreeAddEval : public CauchyEval {
public:
  FreeAddEval(CauchyEval& x, CauchyEval& y, FixedPointConfig cfg) : x_(x), y_(y), cfg_(cfg) {}
  BElement cauchy(const BElement& b) override;
  long iterations_used() const override { return iters_ + x_.iterations_used() + y_.iterations_used(); }
  double last_residual() const { return last_residual_; }
  /// Loosens the internal solve while the enclosing fixed point is far from
  /// converged; the children receive their own hints per iteration.
  void set_accuracy(double a) override { accuracy_ = a; }

private:
  CauchyEval& x_;
  CauchyEval& y_;
  FixedPointConfig cfg_;
  std::optional<BElement> warm_;
  long iters_ = 0;
  double last_residual_ = 0;
  double accuracy_ = 1e-11;
};

/// Left fold of the summand list: direct transform of the first summand,
/// every further summand combined by free_add.
BElement fold(const std::vector<FreeSummand>& summands, const RectSpace& space, int m,
              const QuadratureRule& rule, const BElement& b, const FixedPointConfig& cfg,
              ConvolutionReport* report = nullptr);

/// Cross-check: treat all SemiParts as one operator-valued semicircular with
/// covariance eta(w) = sum_j scale_j^2 D_j w|_{block_j} D_j and solve
/// G = G_det(b - eta(G)) by fixed point. Test-only oracle.
BElement semicirc_covariance_oracle(const std::vector<FreeSummand>& semiparts,
                                    const FreeSummand* det_part, const RectSpace& space, int m,
                                    const BElement& b, const FixedPointConfig& cfg);

} // namespace fdeq
