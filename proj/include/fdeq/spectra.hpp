#pragma once

#include "fdeq/config.hpp"
#include "fdeq/convolve.hpp"

namespace fdeq {

struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> values; // clamped at 0
  double epsilon = 0;
  double mass = 0;          // trapezoidal integral
  double pre_clamp_min = 0; // most negative raw value seen
  std::vector<char> ok;     // per-point success
  int failed = 0;
  bool partial() const { return failed > 0; }

  /// CDF at t by linear interpolation of the trapezoidal integral,
  /// renormalized to total mass 1.
  double cdf(double t) const;
};

struct PointStats {
  long iterations = 0;
  double residual = 0;
};

struct GridStats {
  long iter_min = 0, iter_median = 0, iter_max = 0;
  double residual_max = 0;
};

/// One model instance wired for evaluation: validated, Haar-eliminated,
/// linearized and split. Evaluation-point state lives in per-call evaluators,
/// so a Solver is safe to share across threads.
class Solver {
public:
  Solver(ModelSpec spec, const SolveOptions& opts);

  /// G at Lambda_eps(z), cell (1,1), coefficient of the target projection.
  cpx scalar_cauchy(cpx z, double eps, PointStats* stats = nullptr) const;

  DensityCurve resolve_density(const std::vector<double>& grid, double eps, int threads = 1,
                               GridStats* stats = nullptr) const;

  const ModelSpec& reduced() const { return reduced_; }
  const Linearization& linearization() const { return lin_; }
  const std::vector<FreeSummand>& summands() const { return summands_; }
  const FixedPointConfig& fixed_point() const { return cfg_; }
  const QuadratureRule& rule() const { return rule_; }

private:
  ModelSpec reduced_;
  Linearization lin_;
  std::vector<FreeSummand> summands_; // fold order: cheap parts first
  QuadratureRule rule_;
  FixedPointConfig cfg_;
};

std::vector<double> make_grid(const GridSpec& g);

/// Convenience wrappers mirroring the pipeline operations.
cpx scalar_cauchy(const ModelSpec& spec, cpx z, double eps, const SolveOptions& opts);
DensityCurve resolve_density(const ModelSpec& spec, const std::vector<double>& grid, double eps,
                             const SolveOptions& opts, int threads = 1);

/// Trapezoidal moments of the curve for k = 1..k_max, renormalized by mass.
/// pre: mass >= 0.9.
std::vector<double> moments_from_density(const DensityCurve& curve, int k_max);

} // namespace fdeq
