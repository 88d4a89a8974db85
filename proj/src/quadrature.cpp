#include "fdeq/quadrature.hpp"

#include <cmath>

namespace fdeq {

QuadratureRule semicircle_rule(int n) {
  if (n < 1) fail(Errc::BadArgument, "quadrature order must be >= 1");
  QuadratureRule r;
  r.order = n;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double step = M_PI / (n + 1);
  for (int i = 1; 2 * i <= n + 1; ++i) {
    const double theta = i * step;
    const double s = std::sin(theta);
    const double node = 2.0 * std::cos(theta);
    const double w = 2.0 / (n + 1) * s * s;
    r.nodes[i - 1] = node;
    r.weights[i - 1] = w;
    // mirror for exact t -> -t symmetry
    r.nodes[n - i] = -node;
    r.weights[n - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

QuadratureRule semicircle_midpoint_rule(int n) {
  if (n < 1) fail(Errc::BadArgument, "quadrature order must be >= 1");
  QuadratureRule r;
  r.order = n;
  r.kind = QuadratureRule::Kind::Midpoint;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double h = 4.0 / n;
  double total = 0;
  for (int i = 0; i < n; ++i) {
    const double t = -2.0 + (i + 0.5) * h;
    r.nodes[i] = t;
    r.weights[i] = std::sqrt(std::max(0.0, 4.0 - t * t)) / (2.0 * M_PI) * h;
    total += r.weights[i];
  }
  for (auto& w : r.weights) w /= total;
  return r;
}

} // namespace fdeq
