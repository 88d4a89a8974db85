#include <doctest.h>

#include <cmath>

#include "fdeq/config.hpp"
#include "fdeq/convolve.hpp"
#include "test_models.hpp"

using namespace fdeq;
using namespace fdeq::testing;

namespace {

FreeSummand std_semi() {
  FreeSummand s;
  s.kind = FreeSummand::Kind::Semi;
  s.semi_coeff = CMatrix::identity(1);
  s.block = 0;
  return s;
}

FreeSummand bernoulli_det() {
  FreeSummand s;
  s.kind = FreeSummand::Kind::Det;
  s.cells.mats[{0, 0}].push_back(MatTerm{0, 0, CMatrix::diagonal({cpx(1.0), cpx(-1.0)})});
  return s;
}

BElement scalar_b(cpx z) {
  BElement b = zero_b(1, 1);
  b.blocks[0](0, 0) = z;
  return b;
}

} // namespace

TEST_CASE("free_add: semicircle plus semicircle is the variance-2 semicircle") {
  auto rule = semicircle_rule(200);
  RectSpace space = make_rect_space({1});
  FreeSummand s = std_semi();
  SemiEval x(s, rule, 1), y(s, rule, 1);
  FixedPointConfig cfg;
  ConvolutionReport rep;
  BElement g = free_add(x, y, scalar_b(cpx(0, 3)), cfg, &rep);
  const cpx expect = (cpx(0, 3) - std::sqrt(cpx(0, 3) * cpx(0, 3) - 8.0)) / 4.0;
  CHECK(std::abs(g.blocks[0](0, 0) - expect) <= 1e-9);
  CHECK(rep.residual <= cfg.tol);
  CHECK(rep.iterations > 0);

  // consistency: swapping the roles reproduces the same convolution
  BElement g2 = free_add(y, x, scalar_b(cpx(0, 3)), cfg);
  CHECK(std::abs(g.blocks[0](0, 0) - g2.blocks[0](0, 0)) <= 10 * cfg.tol);
}

TEST_CASE("free_add: convolving with zero is the identity") {
  auto rule = semicircle_rule(200);
  FreeSummand s = std_semi();
  FreeSummand zero;
  zero.kind = FreeSummand::Kind::Det; // empty cells = zero element
  RectSpace space = make_rect_space({1});
  SemiEval x(s, rule, 1);
  DetEval y(zero, space, 1);
  FixedPointConfig cfg;
  const BElement b = scalar_b(cpx(0.4, 0.7));
  BElement g = free_add(x, y, b, cfg);
  BElement direct = SemiEval(s, rule, 1).cauchy(b);
  CHECK(max_diff(g, direct) <= 10 * cfg.tol);
}

TEST_CASE("free_add: Bernoulli plus Bernoulli is the arcsine law") {
  RectSpace space = make_rect_space({2});
  FreeSummand d = bernoulli_det();
  DetEval x(d, space, 1), y(d, space, 1);
  FixedPointConfig cfg;
  BElement g = free_add(x, y, scalar_b(cpx(0, 2)), cfg);
  // G(2i) = 1/sqrt(z^2-4) = -i/(2 sqrt 2)
  CHECK(std::abs(g.blocks[0](0, 0) - cpx(0, -1.0 / (2.0 * std::sqrt(2.0)))) <= 1e-9);
}

TEST_CASE("fold: three standard semicirculars give the variance-3 semicircle") {
  auto rule = semicircle_rule(200);
  RectSpace space = make_rect_space({1});
  std::vector<FreeSummand> parts = {std_semi(), std_semi(), std_semi()};
  FixedPointConfig cfg;
  ConvolutionReport rep;
  BElement g = fold(parts, space, 1, rule, scalar_b(cpx(0, 3)), cfg, &rep);
  const cpx z(0, 3);
  const cpx expect = (z - std::sqrt(z * z - 12.0)) / 6.0;
  CHECK(std::abs(g.blocks[0](0, 0) - expect) <= 1e-8);
  CHECK(rep.iterations > 0);
}

TEST_CASE("fold: a single summand returns its direct transform") {
  auto rule = semicircle_rule(100);
  RectSpace space = make_rect_space({1});
  std::vector<FreeSummand> parts = {std_semi()};
  FixedPointConfig cfg;
  const BElement b = scalar_b(cpx(0.3, 0.8));
  BElement via_fold = fold(parts, space, 1, rule, b, cfg);
  BElement direct = SemiEval(parts[0], rule, 1).cauchy(b);
  CHECK(max_diff(via_fold, direct) == 0.0);
}

TEST_CASE("fold: order invariance across permutations") {
  auto rule = semicircle_rule(150);
  RectSpace space = make_rect_space({2});
  Rng rng(55);

  std::vector<FreeSummand> parts;
  FreeSummand h1;
  h1.kind = FreeSummand::Kind::Det;
  h1.cells.mats[{0, 0}].push_back(MatTerm{0, 0, random_hermitian(2, rng)});
  parts.push_back(h1);
  FreeSummand s1;
  s1.kind = FreeSummand::Kind::Semi;
  s1.semi_coeff = random_hermitian(1, rng);
  s1.semi_coeff = CMatrix::identity(1);
  s1.block = 0;
  parts.push_back(s1);
  FreeSummand s2 = s1;
  s2.semi_coeff(0, 0) = 0.5;
  parts.push_back(s2);

  FixedPointConfig cfg;
  const BElement b = scalar_b(cpx(0.2, 0.5));
  BElement base = fold(parts, space, 1, rule, b, cfg);
  std::vector<std::vector<int>> perms = {{0, 1, 2}, {2, 1, 0}, {1, 0, 2}, {1, 2, 0}};
  for (const auto& perm : perms) {
    std::vector<FreeSummand> shuffled;
    for (int i : perm) shuffled.push_back(parts[i]);
    BElement g = fold(shuffled, space, 1, rule, b, cfg);
    CHECK(max_diff(g, base) <= 1e-8);
  }
}

TEST_CASE("covariance oracle: matches the semicircle transform for one part") {
  auto rule = semicircle_rule(200);
  RectSpace space = make_rect_space({1});
  std::vector<FreeSummand> parts = {std_semi()};
  FixedPointConfig cfg;
  const BElement b = scalar_b(cpx(0.1, 1.2));
  BElement g = semicirc_covariance_oracle(parts, nullptr, space, 1, b, cfg);
  BElement direct = SemiEval(parts[0], rule, 1).cauchy(b);
  CHECK(max_diff(g, direct) <= 1e-9);
}

TEST_CASE("covariance oracle: zero coefficients give the blockwise inverse") {
  RectSpace space = make_rect_space({2});
  FreeSummand s;
  s.kind = FreeSummand::Kind::Semi;
  s.semi_coeff = CMatrix(1, 1);
  s.block = 0;
  FixedPointConfig cfg;
  const BElement b = scalar_b(cpx(0.4, 0.9));
  BElement g = semicirc_covariance_oracle({s}, nullptr, space, 1, b, cfg);
  CHECK(max_diff(g, inverse_b(b)) <= 1e-10);
}

TEST_CASE("covariance oracle: agrees with fold on a mixed model") {
  // Wishart linearization: det part (-1 at cell (1,1)) plus the two
  // semicircular parts of the circular letter
  ModelSpec spec = mp_square_model(1);
  Linearization lin = linearize(spec);
  auto parts = split_classes(lin, spec);
  REQUIRE(parts.size() == 3);

  auto rule = semicircle_rule(200);
  FixedPointConfig cfg;
  const BElement b = lambda_embed(cpx(1.0, 0.05), 0.0, lin.m, 1);

  std::vector<FreeSummand> semis;
  const FreeSummand* det = nullptr;
  for (const auto& p : parts)
    if (p.kind == FreeSummand::Kind::Semi)
      semis.push_back(p);
    else
      det = &p;
  REQUIRE(det != nullptr);

  BElement via_fold = fold(parts, spec.space, lin.m, rule, b, cfg);
  BElement via_oracle = semicirc_covariance_oracle(semis, det, spec.space, lin.m, b, cfg);
  CHECK(max_diff(via_fold, via_oracle) <= 1e-8);
}

TEST_CASE("free_add: iterates stay in the closed upper half-plane") {
  // boundary evaluation (eps = 0) converges on the Wishart model
  ModelSpec spec = mp_square_model(1);
  Linearization lin = linearize(spec);
  auto parts = split_classes(lin, spec);
  FixedPointConfig cfg;
  auto rule = semicircle_rule(200);
  ConvolutionReport rep;
  BElement g = fold(parts, spec.space, lin.m, rule, lambda_embed(cpx(1.0, 0.01), 0.0, lin.m, 1), cfg, &rep);
  CHECK(rep.residual <= cfg.tol);
  // MP(1) transform solves g = 1/(z - 1/(1-g))
  const cpx g11 = g.blocks[0](0, 0);
  const cpx z(1.0, 0.01);
  CHECK(std::abs(g11 - 1.0 / (z - 1.0 / (1.0 - g11))) <= 1e-8);
}

TEST_CASE("free_add: iteration cap raises NoConvergence with the code") {
  auto rule = semicircle_rule(100);
  FreeSummand s = std_semi();
  SemiEval x(s, rule, 1), y(s, rule, 1);
  FixedPointConfig cfg;
  cfg.max_iter = 2;
  cfg.tol = 1e-14;
  try {
    free_add(x, y, scalar_b(cpx(0.0, 0.05)), cfg);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoConvergence);
  }
}

TEST_CASE("fold vs covariance oracle on the two-term mixed model") {
  // one deterministic part plus four semicircular parts from two circulars
  ParsedConfig cfg = parse_config_file(std::string(FDEQ_MODELS_DIR) + "/p_model.toml");
  ModelSpec spec = eliminate_haar(cfg.spec);
  Linearization lin = linearize(spec);
  auto parts = split_classes(lin, spec);
  int semis = 0;
  const FreeSummand* det = nullptr;
  std::vector<FreeSummand> semi_parts;
  for (const auto& p : parts) {
    if (p.kind == FreeSummand::Kind::Semi) {
      ++semis;
      semi_parts.push_back(p);
    } else {
      det = &p;
    }
  }
  REQUIRE(semis == 4);
  REQUIRE(det != nullptr);

  auto rule = semicircle_rule(200);
  FixedPointConfig fpc;
  for (cpx z : {cpx(0.8, 0.1), cpx(-0.5, 0.2)}) {
    const BElement b = lambda_embed(z, 1e-6, lin.m, spec.space.block_count());
    ConvolutionReport rep;
    BElement via_fold = fold(parts, spec.space, lin.m, rule, b, fpc, &rep);
    BElement via_oracle = semicirc_covariance_oracle(semi_parts, det, spec.space, lin.m, b, fpc);
    CHECK(max_diff(via_fold, via_oracle) <= 1e-8);
    CHECK(rep.residual <= fpc.tol);
  }
}
