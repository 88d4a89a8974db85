#pragma once

#include <vector>

#include "fdeq/error.hpp"

namespace fdeq {

/// Quadrature rule for the semicircle weight sqrt(4-t^2)/(2*pi) on [-2,2].
/// Invariants: sum of weights == 1, nodes symmetric under t -> -t.
struct QuadratureRule {
  enum class Kind { Gauss, Midpoint };
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;
  Kind kind = Kind::Gauss;
};

/// Gauss rule built on second-kind Chebyshev nodes scaled to [-2,2]; exact for
/// polynomial integrands of degree <= 2n-1.
QuadratureRule semicircle_rule(int n);

/// Midpoint Riemann rule against the same weight, kept as a cross-check.
/// Weights are normalized to sum to 1.
QuadratureRule semicircle_midpoint_rule(int n);

} // namespace fdeq
