#pragma once

#include <string>
#include <vector>

#include "fdeq/model.hpp"

namespace fdeq {

/// AST for the non-commutative polynomial grammar:
///   expr   := ['-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := primary ("'")*
///   primary:= scalar | ident | adj '(' expr ')' | '(' expr ')'
/// Scalars are "0.5"-style reals or "(re,im)" complex tuples. A postfix
/// apostrophe is the canonical adjoint; adj(...) is accepted too.
struct ExprAst {
  enum class Kind { Sum, Product, Adjoint, SymbolRef, Scalar };
  Kind kind = Kind::Scalar;
  std::vector<ExprAst> children;
  std::string name;
  cpx value{0.0, 0.0};

  bool operator==(const ExprAst&) const = default;
};

ExprAst parse_polynomial(const std::string& text);

/// Push adjoints down to symbol references: (AB)' -> B'A', (A+B)' -> A'+B',
/// (s A)' -> conj(s) A', A'' -> A. Idempotent.
ExprAst normalize_adjoints(const ExprAst& ast);

/// Canonical printing; parse(print(ast)) is structurally identical to ast for
/// parser-produced trees.
std::string print_expr(const ExprAst& ast);

/// Expand into monomial form (distributes products over sums, folds scalars
/// into coefficients).
Polynomial to_polynomial(const ExprAst& ast);

} // namespace fdeq
