#include "fdeq/montecarlo.hpp"

#include <algorithm>
#include <cmath>

namespace fdeq {

CMatrix sample_ginibre(int rows, int cols, double entry_var, Rng& rng) {
  CMatrix g(rows, cols);
  const double s = std::sqrt(entry_var / 2.0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = cpx(s * rng.normal(), s * rng.normal());
  return g;
}

CMatrix sample_wigner(int n, Rng& rng) {
  CMatrix g = sample_ginibre(n, n, 1.0 / n, rng);
  CMatrix x = adjoint(g);
  x += g;
  x *= cpx(1.0 / std::sqrt(2.0));
  return x;
}

CMatrix sample_haar_unitary(int n, Rng& rng) {
  CMatrix a = sample_ginibre(n, n, 1.0, rng);

  // Householder QR, reflectors kept for the Q accumulation
  std::vector<std::vector<cpx>> vs(n);
  for (int k = 0; k < n; ++k) {
    double norm2 = 0;
    for (int i = k; i < n; ++i) norm2 += std::norm(a(i, k));
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;
    const cpx x0 = a(k, k);
    const double x0a = std::abs(x0);
    const cpx phase = x0a > 0 ? x0 / x0a : cpx(1.0);
    const cpx alpha = -phase * norm;

    std::vector<cpx> v(n - k);
    v[0] = x0 - alpha;
    for (int i = k + 1; i < n; ++i) v[i - k] = a(i, k);
    double vnorm2 = 0;
    for (const auto& c : v) vnorm2 += std::norm(c);
    if (vnorm2 == 0.0) continue;
    const double inv = 1.0 / std::sqrt(vnorm2);
    for (auto& c : v) c *= inv;

    for (int j = k; j < n; ++j) {
      cpx s = 0;
      for (int i = k; i < n; ++i) s += std::conj(v[i - k]) * a(i, j);
      s *= 2.0;
      for (int i = k; i < n; ++i) a(i, j) -= v[i - k] * s;
    }
    vs[k] = std::move(v);
  }

  CMatrix q = CMatrix::identity(n);
  for (int k = n - 1; k >= 0; --k) {
    if (vs[k].empty()) continue;
    const auto& v = vs[k];
    for (int j = 0; j < n; ++j) {
      cpx s = 0;
      for (int i = k; i < n; ++i) s += std::conj(v[i - k]) * q(i, j);
      s *= 2.0;
      for (int i = k; i < n; ++i) q(i, j) -= v[i - k] * s;
    }
  }

  // divide columns by the phases of R's diagonal
  for (int j = 0; j < n; ++j) {
    const cpx r = a(j, j);
    const double ra = std::abs(r);
    const cpx phase = ra > 0 ? r / ra : cpx(1.0);
    for (int i = 0; i < n; ++i) q(i, j) *= phase;
  }
  return q;
}

namespace {

CMatrix blow_up(const CMatrix& a, int m) {
  CMatrix out(a.rows() * m, a.cols() * m);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const cpx v = a(i, j);
      if (v == cpx(0.0)) continue;
      for (int t = 0; t < m; ++t) out(i * m + t, j * m + t) = v;
    }
  return out;
}

} // namespace

CMatrix sample_ensemble(const ModelSpec& spec, int m, Rng& rng) {
  if (!spec.validated) fail(Errc::BadArgument, "sample_ensemble needs a validated spec");
  if (m < 1) fail(Errc::BadArgument, "blow-up factor must be >= 1");

  std::map<std::string, CMatrix> sampled;
  for (const auto& [name, sym] : spec.symbols) {
    const int nb = spec.space.block_dims[sym.row_block] * m;
    switch (sym.kind) {
      case SymbolKind::Deterministic:
        sampled[name] = blow_up(sym.matrix, m);
        break;
      case SymbolKind::Circular:
        sampled[name] = sample_ginibre(nb, nb, 1.0 / nb, rng);
        break;
      case SymbolKind::Semicircular:
        sampled[name] = sample_wigner(nb, rng);
        break;
      case SymbolKind::HaarUnitary:
        sampled[name] = sample_haar_unitary(nb, rng);
        break;
    }
  }

  const int nt = spec.space.block_dims[spec.target_block] * m;
  CMatrix corner(nt, nt);
  for (const auto& mono : spec.polynomial.monomials) {
    CMatrix prod;
    if (mono.word.empty()) {
      prod = CMatrix::identity(nt);
    } else {
      for (const auto& f : mono.word) {
        const CMatrix& base = sampled.at(f.symbol);
        CMatrix factor = f.adj ? adjoint(base) : base;
        prod = prod.empty() ? std::move(factor) : mul(prod, factor);
      }
    }
    prod *= mono.coeff;
    corner += prod;
  }
  return corner;
}

CMatrix sample_ensemble(const ModelSpec& spec, int m, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 0);
  return sample_ensemble(spec, m, rng);
}

EmpiricalSpectrum empirical_spectrum(const ModelSpec& spec, int m, int reps, std::uint64_t seed) {
  EmpiricalSpectrum out;
  out.m = m;
  out.reps = reps;
  out.seed = seed;
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::stream(seed, std::uint64_t(r));
    const CMatrix corner = sample_ensemble(spec, m, rng);
    const auto eigs = herm_eig(corner);
    out.eigenvalues.insert(out.eigenvalues.end(), eigs.begin(), eigs.end());
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

double ks_distance(const EmpiricalSpectrum& emp, const DensityCurve& curve) {
  if (curve.mass < 0.9)
    fail(Errc::BadArgument, "curve mass below 0.9; widen the solver grid");
  const auto& e = emp.eigenvalues;
  const double M = double(e.size());
  double ks = 0;
  for (size_t i = 0; i < e.size(); ++i) {
    const double f = curve.cdf(e[i]);
    ks = std::max(ks, std::abs(double(i + 1) / M - f));
    ks = std::max(ks, std::abs(double(i) / M - f));
  }
  return std::min(1.0, ks);
}

std::vector<HistogramBin> histogram(const EmpiricalSpectrum& emp, int bins) {
  if (bins < 1) fail(Errc::BadArgument, "need at least one bin");
  std::vector<HistogramBin> out(bins);
  if (emp.eigenvalues.empty()) return out;
  const double lo = emp.eigenvalues.front();
  const double hi = emp.eigenvalues.back();
  const double width = (hi > lo) ? (hi - lo) / bins : 1.0;
  for (int b = 0; b < bins; ++b) out[b] = HistogramBin{lo + (b + 0.5) * width, 0};
  for (double x : emp.eigenvalues) {
    int b = int((x - lo) / width);
    if (b >= bins) b = bins - 1;
    if (b < 0) b = 0;
    ++out[b].count;
  }
  return out;
}

GridSpec pilot_grid(const ModelSpec& spec, std::uint64_t seed, int points) {
  const CMatrix corner = sample_ensemble(spec, 2, seed);
  const auto eigs = herm_eig(corner);
  GridSpec g;
  g.lo = eigs.front() - 1.0;
  g.hi = eigs.back() + 1.0;
  g.points = points;
  return g;
}

} // namespace fdeq
