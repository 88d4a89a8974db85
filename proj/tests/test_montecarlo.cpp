#include <doctest.h>

#include <cmath>

#include "fdeq/montecarlo.hpp"
#include "test_models.hpp"

using namespace fdeq;
using namespace fdeq::testing;

TEST_CASE("haar sample is unitary to working precision") {
  Rng rng(2);
  for (int n : {1, 5, 30}) {
    CMatrix u = sample_haar_unitary(n, rng);
    CMatrix utu = mul(adjoint(u), u);
    utu -= CMatrix::identity(n);
    CHECK(max_abs(utu) <= 1e-12);
  }
}

TEST_CASE("wigner sample is Hermitian with unit second moment") {
  Rng rng(3);
  const int n = 100;
  CMatrix x = sample_wigner(n, rng);
  CHECK(herm_defect(x) == 0.0);
  const cpx m2 = trace(mul(x, x));
  CHECK(std::abs(m2.real() / n - 1.0) <= 0.15);
}

TEST_CASE("ginibre normalization") {
  Rng rng(4);
  const int n = 120;
  CMatrix z = sample_ginibre(n, n, 1.0 / n, rng);
  const cpx zz = trace(mul(z, adjoint(z)));
  CHECK(std::abs(zz.real() / n - 1.0) <= 0.1);
}

TEST_CASE("sample_ensemble: deterministic model reproduces blown-up eigenvalues") {
  Rng rng(6);
  CMatrix d = random_hermitian(3, rng);
  ModelSpec spec = make_model({3}, {det_symbol("D", d, 0, 0)}, "D");
  const int m = 4;
  CMatrix corner = sample_ensemble(spec, m, 123);
  auto eigs = herm_eig(corner);
  auto base = herm_eig(d);
  REQUIRE(int(eigs.size()) == 3 * m);
  for (int i = 0; i < 3; ++i)
    for (int t = 0; t < m; ++t) CHECK(std::abs(eigs[i * m + t] - base[i]) <= 1e-10);
}

TEST_CASE("sample_ensemble: corner of the unitary model is Hermitian") {
  ModelSpec spec = q_model();
  CMatrix corner = sample_ensemble(spec, 3, 77);
  CHECK(corner.rows() == 15);
  CHECK(herm_defect(corner) <= 1e-12 * std::max(1.0, max_abs(corner)));
}

TEST_CASE("empirical_spectrum: counts and determinism") {
  ModelSpec spec = q_model();
  EmpiricalSpectrum a = empirical_spectrum(spec, 2, 3, 99);
  CHECK(int(a.eigenvalues.size()) == 5 * 2 * 3);
  EmpiricalSpectrum b = empirical_spectrum(spec, 2, 3, 99);
  REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
  for (size_t i = 0; i < a.eigenvalues.size(); ++i) CHECK(a.eigenvalues[i] == b.eigenvalues[i]);
  EmpiricalSpectrum c = empirical_spectrum(spec, 2, 3, 100);
  CHECK(a.eigenvalues != c.eigenvalues);
}

TEST_CASE("fourth-moment check at modest size (quick version)") {
  // E tau(Z Z* Z* Z) = 1 + 1/N^2 exactly for the Gaussian ensemble
  const int N = 30;
  const int reps = 200;
  double sum = 0, sumsq = 0;
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::stream(4242, r);
    CMatrix z = sample_ginibre(N, N, 1.0 / N, rng);
    CMatrix za = adjoint(z);
    const double v = trace(mul(mul(mul(z, za), za), z)).real() / N;
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / reps;
  const double stderr_ = std::sqrt((sumsq / reps - mean * mean) / reps);
  const double expect = 1.0 + 1.0 / double(N) / double(N);
  CHECK(std::abs(mean - expect) <= 5 * stderr_);
}

TEST_CASE("ks_distance: identical, disjoint and sampled-from-curve cases") {
  Solver solver(semicircle_model(), SolveOptions{});
  DensityCurve curve = solver.resolve_density(make_grid({-3.0, 3.0, 601}), 1e-3, 1);

  // stratified inverse-CDF sample drawn from the curve itself
  EmpiricalSpectrum emp;
  emp.m = 1;
  emp.reps = 1;
  const int M = 20000;
  {
    // invert the CDF by sweeping the grid
    std::vector<double> cum(curve.grid.size(), 0.0);
    for (size_t i = 1; i < curve.grid.size(); ++i)
      cum[i] = cum[i - 1] +
               0.5 * (curve.values[i] + curve.values[i - 1]) * (curve.grid[i] - curve.grid[i - 1]);
    for (auto& c : cum) c /= cum.back();
    size_t j = 1;
    for (int i = 0; i < M; ++i) {
      const double u = (i + 0.5) / M;
      while (j + 1 < cum.size() && cum[j] < u) ++j;
      const double frac = (u - cum[j - 1]) / std::max(1e-300, cum[j] - cum[j - 1]);
      emp.eigenvalues.push_back(curve.grid[j - 1] + frac * (curve.grid[j] - curve.grid[j - 1]));
    }
  }
  CHECK(ks_distance(emp, curve) <= 0.015);

  EmpiricalSpectrum shifted = emp;
  for (auto& x : shifted.eigenvalues) x += 100.0;
  CHECK(ks_distance(shifted, curve) == 1.0);
}

TEST_CASE("histogram: bins cover the sample") {
  EmpiricalSpectrum emp;
  emp.eigenvalues = {0.0, 0.1, 0.2, 0.9, 1.0};
  auto h = histogram(emp, 4);
  long total = 0;
  for (const auto& bin : h) total += bin.count;
  CHECK(total == 5);
}

TEST_CASE("pilot grid brackets the deterministic spectrum") {
  Rng rng(8);
  CMatrix d = random_hermitian(4, rng);
  ModelSpec spec = make_model({4}, {det_symbol("D", d, 0, 0)}, "D");
  GridSpec g = pilot_grid(spec, 7, 100);
  auto eigs = herm_eig(d);
  CHECK(g.lo <= eigs.front());
  CHECK(g.hi >= eigs.back());
  CHECK(g.points == 100);
}
