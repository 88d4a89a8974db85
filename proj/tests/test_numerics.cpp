#include <doctest.h>

#include <cmath>

#include "fdeq/complexmat.hpp"
#include "fdeq/quadrature.hpp"
#include "fdeq/rng.hpp"

using namespace fdeq;

namespace {

CMatrix random_matrix(int n, Rng& rng) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cpx(rng.normal(), rng.normal());
  return m;
}

CMatrix random_hermitian(int n, Rng& rng) {
  CMatrix a = random_matrix(n, rng);
  CMatrix h = adjoint(a);
  h += a;
  h *= cpx(0.5);
  return h;
}

double exact_semicircle_moment(int k) {
  if (k % 2 != 0) return 0.0;
  // Catalan number C_{k/2}
  double c = 1;
  for (int i = 0; i < k / 2; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

} // namespace

TEST_CASE("invert: identity and diagonal") {
  CHECK(max_abs(invert(CMatrix::identity(4)) - CMatrix::identity(4)) == 0.0);
  CMatrix d = CMatrix::diagonal({cpx(0, 2), cpx(0, 1)});
  CMatrix di = invert(d);
  CHECK(std::abs(di(0, 0) - cpx(0, -0.5)) < 1e-15);
  CHECK(std::abs(di(1, 1) - cpx(0, -1.0)) < 1e-15);
}

TEST_CASE("invert: residual on a random well-conditioned 8x8") {
  Rng rng(42);
  CMatrix m = random_matrix(8, rng);
  for (int i = 0; i < 8; ++i) m(i, i) += 10.0; // keep it well-conditioned
  CMatrix r = mul(m, invert(m));
  r -= CMatrix::identity(8);
  CHECK(max_abs(r) <= 1e-10);
}

TEST_CASE("invert twice returns the input") {
  Rng rng(7);
  CMatrix m = random_matrix(6, rng);
  for (int i = 0; i < 6; ++i) m(i, i) += 8.0;
  CHECK(max_abs(invert(invert(m)) - m) <= 1e-9 * max_abs(m));
}

TEST_CASE("invert: singular input raises") {
  CMatrix z(3, 3);
  CHECK_THROWS_WITH_AS(invert(z), doctest::Contains("pivot"), Error);
  try {
    invert(z);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Singular);
  }
}

TEST_CASE("herm_eig: fixed examples") {
  CMatrix d = CMatrix::diagonal({cpx(3), cpx(1), cpx(2)});
  auto ev = herm_eig(d);
  CHECK(ev == std::vector<double>{1, 2, 3});

  CMatrix x(2, 2);
  x(0, 1) = 1;
  x(1, 0) = 1;
  auto ev2 = herm_eig(x);
  CHECK(std::abs(ev2[0] + 1.0) < 1e-14);
  CHECK(std::abs(ev2[1] - 1.0) < 1e-14);
}

TEST_CASE("herm_eig: trace identity on random 16x16") {
  Rng rng(3);
  CMatrix h = random_hermitian(16, rng);
  auto ev = herm_eig(h);
  double sum = 0;
  for (double v : ev) sum += v;
  CHECK(std::abs(sum - trace(h).real()) <= 1e-9 * std::max(1.0, max_abs(h)));
}

TEST_CASE("herm_eig: rotation invariance") {
  Rng rng(11);
  CMatrix h = random_hermitian(10, rng);
  // unitary from the eigenvectors of another random Hermitian matrix
  CMatrix u = herm_eig_full(random_hermitian(10, rng)).vectors;
  CMatrix rotated = mul(mul(u, h), adjoint(u));
  auto a = herm_eig(h);
  auto b = herm_eig(rotated);
  for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
}

TEST_CASE("herm_eig_full: reconstruction residual") {
  Rng rng(5);
  for (int n : {1, 2, 3, 8, 16}) {
    CMatrix h = random_hermitian(n, rng);
    auto r = herm_eig_full(h);
    // residual ||V diag(v) V* - H||
    CMatrix vd = r.vectors;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) vd(i, j) *= r.values[j];
    CMatrix rec = mul(vd, adjoint(r.vectors));
    CHECK(max_abs(rec - h) <= 1e-9 * std::max(1.0, max_abs(h)));
    // orthonormality
    CMatrix vtv = mul(adjoint(r.vectors), r.vectors);
    vtv -= CMatrix::identity(n);
    CHECK(max_abs(vtv) <= 1e-12);
  }
}

TEST_CASE("herm_eig: non-Hermitian input raises") {
  CMatrix m(2, 2);
  m(0, 1) = 1.0; // m(1,0) stays 0
  try {
    herm_eig(m);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotHermitian);
  }
}

TEST_CASE("semicircle_rule: normalization, symmetry, Catalan moments") {
  for (int n : {1, 2, 3, 5, 20, 200}) {
    auto r = semicircle_rule(n);
    double total = 0;
    for (double w : r.weights) {
      CHECK(w >= 0);
      total += w;
    }
    CHECK(std::abs(total - 1.0) < 1e-14);
    for (int i = 0; i < n; ++i) CHECK(r.nodes[i] == -r.nodes[n - 1 - i]);

    // exact for degree <= 2n-1 up to roundoff in summing n terms of size 2^k
    for (int k = 0; k <= std::min(2 * n - 1, 40); ++k) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += r.weights[i] * std::pow(r.nodes[i], k);
      const double expect = exact_semicircle_moment(k);
      const double tol = 1e-12 * expect + 1e-13 * (1.0 + std::pow(2.0, k));
      CHECK(std::abs(acc - expect) < tol);
    }
  }
}

TEST_CASE("semicircle_rule: second and fourth moments per the law") {
  auto r2 = semicircle_rule(2);
  double m2 = 0;
  for (int i = 0; i < 2; ++i) m2 += r2.weights[i] * r2.nodes[i] * r2.nodes[i];
  CHECK(std::abs(m2 - 1.0) < 1e-14);

  auto r3 = semicircle_rule(3);
  double m4 = 0;
  for (int i = 0; i < 3; ++i) m4 += r3.weights[i] * std::pow(r3.nodes[i], 4);
  CHECK(std::abs(m4 - 2.0) < 1e-13);
}

TEST_CASE("midpoint rule approaches the Gauss rule") {
  auto gauss = semicircle_rule(50);
  auto mid = semicircle_midpoint_rule(4000);
  auto integrate = [](const QuadratureRule& r, int k) {
    double acc = 0;
    for (size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], k);
    return acc;
  };
  for (int k : {0, 2, 4, 6}) CHECK(std::abs(integrate(gauss, k) - integrate(mid, k)) < 1e-3);
  double total = 0;
  for (double w : mid.weights) total += w;
  CHECK(std::abs(total - 1.0) < 1e-14);
}

TEST_CASE("invert_small_inplace matches the LU inverse") {
  Rng rng(19);
  for (int n : {1, 2, 3, 5, 8}) {
    CMatrix m = random_matrix(n, rng);
    for (int i = 0; i < n; ++i) m(i, i) += 4.0;
    CMatrix expect = invert(m);
    std::vector<cpx> buf(m.data(), m.data() + size_t(n) * n);
    std::vector<int> piv(n);
    REQUIRE(invert_small_inplace(buf.data(), n, piv.data()));
    double err = 0;
    for (int i = 0; i < n * n; ++i) err = std::max(err, std::abs(buf[i] - expect.data()[i]));
    CHECK(err <= 1e-12);
  }
  // singular input reports failure instead of garbage
  std::vector<cpx> zeros(9, cpx(0.0));
  std::vector<int> piv(3);
  CHECK_FALSE(invert_small_inplace(zeros.data(), 3, piv.data()));
}
