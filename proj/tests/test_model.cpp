#include <doctest.h>

#include <set>

#include "fdeq/model.hpp"
#include "test_models.hpp"

using namespace fdeq;
using namespace fdeq::testing;

namespace {

Errc validation_code(std::vector<int> blocks, std::vector<Symbol> symbols, const std::string& poly) {
  try {
    make_model(std::move(blocks), std::move(symbols), poly);
    return Errc::BadArgument;
  } catch (const Error& e) {
    return e.code();
  }
}

} // namespace

TEST_CASE("validate: the two-sandwich model with the published block sizes") {
  ModelSpec spec = q_model();
  CHECK(spec.validated);
  CHECK(spec.space.total_dim == 17);
  CHECK(spec.polynomial.monomials.size() == 2);
  for (const auto& mono : spec.polynomial.monomials) {
    REQUIRE(mono.block_trace.size() == mono.word.size() + 1);
    CHECK(mono.block_trace.front() == 0);
    CHECK(mono.block_trace.back() == 0);
  }
  // sum of relative traces is 1
  double total = 0;
  for (double w : spec.space.weights) total += w;
  CHECK(std::abs(total - 1.0) < 1e-15);
}

TEST_CASE("validate: idempotent") {
  ModelSpec spec = q_model();
  ModelSpec again = validate(spec);
  CHECK(again.polynomial.monomials.size() == spec.polynomial.monomials.size());
  for (size_t i = 0; i < again.polynomial.monomials.size(); ++i) {
    CHECK(again.polynomial.monomials[i].word == spec.polynomial.monomials[i].word);
    CHECK(again.polynomial.monomials[i].coeff == spec.polynomial.monomials[i].coeff);
  }
  for (const auto& [name, sym] : again.symbols) CHECK(sym.class_id == spec.symbols.at(name).class_id);
}

TEST_CASE("validate: non-self-adjoint polynomial is rejected") {
  Rng rng(1);
  CHECK(validation_code({2, 2},
                        {det_symbol("R1", random_complex(2, 2, rng), 0, 1),
                         det_symbol("T1", random_hermitian(2, rng), 1, 1)},
                        "R1*T1") == Errc::NotSelfAdjoint);
}

TEST_CASE("validate: broken dimension chain is a block mismatch") {
  Rng rng(2);
  CHECK(validation_code({2, 3, 4},
                        {det_symbol("R1", random_complex(2, 3, rng), 0, 1),
                         det_symbol("T2", random_hermitian(4, rng), 2, 2)},
                        "R1*T2") == Errc::BlockMismatch);
}

TEST_CASE("validate: unknown symbol") {
  CHECK(validation_code({2}, {}, "X") == Errc::UnknownSymbol);
}

TEST_CASE("validate: Hermitian deterministic letters absorb adjoints") {
  Rng rng(3);
  ModelSpec spec = make_model({3}, {det_symbol("T", random_hermitian(3, rng), 0, 0)}, "T + T'");
  REQUIRE(spec.polynomial.monomials.size() == 1);
  CHECK(spec.polynomial.monomials[0].coeff == cpx(2.0));
  CHECK_FALSE(spec.polynomial.monomials[0].word[0].adj);
}

TEST_CASE("eliminate_haar: sandwiches become rotated classes") {
  ModelSpec spec = eliminate_haar(q_model());
  for (const auto& [name, sym] : spec.symbols) CHECK(sym.kind != SymbolKind::HaarUnitary);

  // words are now R T~ R' with the clone in the unitary's class
  REQUIRE(spec.polynomial.monomials.size() == 2);
  std::set<int> rotated_classes;
  for (const auto& mono : spec.polynomial.monomials) {
    REQUIRE(mono.word.size() == 3);
    const Symbol& outer = spec.symbols.at(mono.word[0].symbol);
    const Symbol& inner = spec.symbols.at(mono.word[1].symbol);
    CHECK(outer.class_id == 0);
    CHECK(inner.class_id != 0);
    rotated_classes.insert(inner.class_id);
  }
  CHECK(rotated_classes.size() == 2); // one class per sandwich family

  // deterministic data unchanged
  ModelSpec orig = q_model();
  const Symbol& t1 = orig.symbols.at("T1");
  bool found = false;
  for (const auto& [name, sym] : spec.symbols)
    if (name.rfind("T1", 0) == 0 && sym.kind == SymbolKind::Deterministic) {
      CHECK(sym.matrix == t1.matrix);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("eliminate_haar: unitarity cancellation") {
  Rng rng(4);
  ModelSpec spec = make_model({3}, {det_symbol("A", random_hermitian(3, rng), 0, 0),
                                    rand_symbol("u", SymbolKind::HaarUnitary, 0)},
                              "A*u*u'*A");
  ModelSpec out = eliminate_haar(spec);
  REQUIRE(out.polynomial.monomials.size() == 1);
  CHECK(out.polynomial.monomials[0].word == Word{{"A", false}, {"A", false}});
}

TEST_CASE("eliminate_haar: unmatched unitary is unsupported") {
  Rng rng(5);
  ModelSpec spec = make_model({2, 2},
                              {det_symbol("R", random_complex(2, 2, rng), 0, 1),
                               det_symbol("T", random_hermitian(2, rng), 1, 1),
                               rand_symbol("u", SymbolKind::HaarUnitary, 1)},
                              "R*u*T*R' + R*T*u'*R'");
  try {
    eliminate_haar(spec);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnsupportedHaarUsage);
  }
}

TEST_CASE("eliminate_haar: self-adjointness and entries preserved on the Bernoulli model") {
  ModelSpec out = eliminate_haar(bernoulli_model(2));
  CHECK(out.polynomial.monomials.size() == 2);
  // both monomials are degree-1 Hermitian letters now, one per class
  std::set<int> classes;
  for (const auto& mono : out.polynomial.monomials) {
    REQUIRE(mono.word.size() == 1);
    classes.insert(out.symbols.at(mono.word[0].symbol).class_id);
  }
  CHECK(classes.size() == 2);
}

TEST_CASE("eliminate_haar: rotation preserves outer blocks") {
  ModelSpec spec = eliminate_haar(q_model());
  CHECK(spec.polynomial.row_block == 0);
  CHECK(spec.polynomial.col_block == 0);
}

TEST_CASE("assemble_deterministic matches a hand-built frame") {
  CMatrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  ModelSpec spec = make_model({2}, {det_symbol("D", d, 0, 0)}, "D");
  CMatrix full = assemble_deterministic(spec);
  CHECK(full(0, 0) == cpx(2.0));
  CHECK(full(1, 1) == cpx(-1.0));
}

TEST_CASE("eliminate_haar: multiset of deterministic entries is preserved") {
  ModelSpec before = q_model();
  ModelSpec after = eliminate_haar(before);
  auto entries = [](const ModelSpec& spec) {
    std::vector<std::pair<double, double>> out;
    std::set<std::string> used;
    for (const auto& mono : spec.polynomial.monomials)
      for (const auto& f : mono.word) used.insert(f.symbol);
    for (const auto& name : used) {
      const Symbol& s = spec.symbols.at(name);
      if (s.kind != SymbolKind::Deterministic) continue;
      for (int i = 0; i < s.matrix.rows(); ++i)
        for (int j = 0; j < s.matrix.cols(); ++j)
          out.emplace_back(s.matrix(i, j).real(), s.matrix(i, j).imag());
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(entries(before) == entries(after));
}
