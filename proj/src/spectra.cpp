#include "fdeq/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "fdeq/threadpool.hpp"

namespace fdeq {

double DensityCurve::cdf(double t) const {
  if (grid.empty() || mass <= 0) return 0;
  if (t <= grid.front()) return 0;
  if (t >= grid.back()) return 1;
  double acc = 0;
  for (size_t i = 1; i < grid.size(); ++i) {
    const double h = grid[i] - grid[i - 1];
    if (t < grid[i]) {
      const double frac = (t - grid[i - 1]) / h;
      const double vt = values[i - 1] + frac * (values[i] - values[i - 1]);
      acc += 0.5 * (values[i - 1] + vt) * frac * h;
      return std::min(1.0, acc / mass);
    }
    acc += 0.5 * (values[i - 1] + values[i]) * h;
  }
  return 1;
}

std::vector<double> make_grid(const GridSpec& g) {
  std::vector<double> out(g.points);
  for (int i = 0; i < g.points; ++i) out[i] = g.lo + (g.hi - g.lo) * i / double(g.points - 1);
  return out;
}

Solver::Solver(ModelSpec spec, const SolveOptions& opts) {
  reduced_ = eliminate_haar(std::move(spec));
  lin_ = linearize(reduced_);
  summands_ = split_classes(lin_, reduced_);
  rule_ = opts.midpoint_quadrature ? semicircle_midpoint_rule(opts.quad_nodes)
                                   : semicircle_rule(opts.quad_nodes);
  cfg_.tol = opts.tolerance;
  cfg_.max_iter = opts.max_iter;
  cfg_.damping = opts.damping;

  // fold cheap summands first so the expensive full-frame resolvent sits at
  // the outermost subordination level and is evaluated once per outer step
  std::vector<int> order(summands_.size());
  std::vector<int> rank(summands_.size(), 0);
  for (size_t i = 0; i < summands_.size(); ++i) {
    order[i] = int(i);
    if (summands_[i].kind == FreeSummand::Kind::Det)
      rank[i] = DetEval(summands_[i], reduced_.space, lin_.m).fast_path() ? 0 : 1;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rank[a] < rank[b]; });
  std::vector<FreeSummand> sorted;
  sorted.reserve(summands_.size());
  for (int i : order) sorted.push_back(std::move(summands_[i]));
  summands_ = std::move(sorted);
}

cpx Solver::scalar_cauchy(cpx z, double eps, PointStats* stats) const {
  const BElement b = lambda_embed(z, eps, lin_.m, reduced_.space.block_count());
  ConvolutionReport rep;
  const BElement g = fold(summands_, reduced_.space, lin_.m, rule_, b, cfg_, &rep);
  if (stats) {
    stats->iterations = rep.iterations;
    stats->residual = rep.residual;
  }
  return g.blocks[reduced_.target_block](0, 0);
}

DensityCurve Solver::resolve_density(const std::vector<double>& grid, double eps, int threads,
                                     GridStats* stats) const {
  if (!(eps > 0)) fail(Errc::BadArgument, "resolve_density needs eps > 0");
  for (size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1]) fail(Errc::BadArgument, "grid must be ascending");

  const int n = int(grid.size());
  std::vector<double> raw(n, 0.0);
  std::vector<char> ok(n, 1);
  std::vector<long> iters(n, 0);
  std::vector<double> residuals(n, 0.0);

  parallel_for(n, threads, [&](int i) {
    try {
      PointStats ps;
      const cpx g = scalar_cauchy(cpx(grid[i], eps), eps, &ps);
      raw[i] = -g.imag() / M_PI;
      iters[i] = ps.iterations;
      residuals[i] = ps.residual;
    } catch (const Error&) {
      ok[i] = 0;
    }
  });

  DensityCurve curve;
  curve.grid = grid;
  curve.epsilon = eps;
  curve.ok = ok;
  for (char o : ok)
    if (!o) ++curve.failed;
  if (curve.failed == n)
    fail(Errc::NoConvergence, "every grid point failed; loosen the tolerance or raise max_iter");

  // failed points are bridged by linear interpolation so the grid stays uniform
  for (int i = 0; i < n; ++i) {
    if (ok[i]) continue;
    int lo = i - 1;
    while (lo >= 0 && !ok[lo]) --lo;
    int hi = i + 1;
    while (hi < n && !ok[hi]) ++hi;
    if (lo >= 0 && hi < n)
      raw[i] = raw[lo] + (raw[hi] - raw[lo]) * (grid[i] - grid[lo]) / (grid[hi] - grid[lo]);
    else if (lo >= 0)
      raw[i] = raw[lo];
    else if (hi < n)
      raw[i] = raw[hi];
  }

  curve.pre_clamp_min = raw.empty() ? 0.0 : *std::min_element(raw.begin(), raw.end());
  curve.values.resize(n);
  for (int i = 0; i < n; ++i) curve.values[i] = std::max(0.0, raw[i]);
  for (int i = 1; i < n; ++i)
    curve.mass += 0.5 * (curve.values[i] + curve.values[i - 1]) * (grid[i] - grid[i - 1]);

  if (stats) {
    std::vector<long> sorted;
    for (int i = 0; i < n; ++i)
      if (ok[i]) sorted.push_back(iters[i]);
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty()) {
      stats->iter_min = sorted.front();
      stats->iter_max = sorted.back();
      stats->iter_median = sorted[sorted.size() / 2];
    }
    stats->residual_max = 0;
    for (int i = 0; i < n; ++i)
      if (ok[i]) stats->residual_max = std::max(stats->residual_max, residuals[i]);
  }
  return curve;
}

cpx scalar_cauchy(const ModelSpec& spec, cpx z, double eps, const SolveOptions& opts) {
  return Solver(spec, opts).scalar_cauchy(z, eps);
}

DensityCurve resolve_density(const ModelSpec& spec, const std::vector<double>& grid, double eps,
                             const SolveOptions& opts, int threads) {
  return Solver(spec, opts).resolve_density(grid, eps, threads);
}

std::vector<double> moments_from_density(const DensityCurve& curve, int k_max) {
  if (curve.mass < 0.9)
    fail(Errc::BadArgument, "curve mass " + std::to_string(curve.mass) + " below 0.9; widen the grid");
  std::vector<double> out(k_max, 0.0);
  for (int k = 1; k <= k_max; ++k) {
    double acc = 0;
    for (size_t i = 1; i < curve.grid.size(); ++i) {
      const double a = std::pow(curve.grid[i - 1], k) * curve.values[i - 1];
      const double b = std::pow(curve.grid[i], k) * curve.values[i];
      acc += 0.5 * (a + b) * (curve.grid[i] - curve.grid[i - 1]);
    }
    out[k - 1] = acc / curve.mass;
  }
  return out;
}

} // namespace fdeq
