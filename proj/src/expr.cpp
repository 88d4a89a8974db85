#include "fdeq/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>

namespace fdeq {

namespace {

struct Lexer {
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void error(const std::string& what) {
    fail(Errc::SyntaxError, what + " at position " + std::to_string(pos));
  }

  std::optional<double> number() {
    skip_ws();
    size_t start = pos;
    size_t p = pos;
    if (p < s.size() && (s[p] == '+' || s[p] == '-')) ++p;
    size_t digits = p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    if (p < s.size() && s[p] == '.') {
      ++p;
      while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    }
    if (p == digits || (p == digits + 1 && s[digits] == '.')) return std::nullopt;
    if (p < s.size() && (s[p] == 'e' || s[p] == 'E')) {
      size_t q = p + 1;
      if (q < s.size() && (s[q] == '+' || s[q] == '-')) ++q;
      size_t exp_digits = q;
      while (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) ++q;
      if (q > exp_digits) p = q;
    }
    double v = std::stod(s.substr(start, p - start));
    pos = p;
    return v;
  }

  std::optional<std::string> ident() {
    skip_ws();
    if (pos >= s.size() || !(std::isalpha(static_cast<unsigned char>(s[pos])))) return std::nullopt;
    size_t p = pos;
    while (p < s.size() && (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '_')) ++p;
    std::string r = s.substr(pos, p - pos);
    pos = p;
    return r;
  }
};

struct Parser {
  Lexer lx;
  int paren_depth = 0;

  explicit Parser(const std::string& text) : lx{text} {}

  ExprAst negate(ExprAst term) {
    ExprAst neg;
    neg.kind = ExprAst::Kind::Scalar;
    neg.value = cpx(-1.0, 0.0);
    if (term.kind == ExprAst::Kind::Product) {
      term.children.insert(term.children.begin(), neg);
      return term;
    }
    ExprAst prod;
    prod.kind = ExprAst::Kind::Product;
    prod.children.push_back(std::move(neg));
    prod.children.push_back(std::move(term));
    return prod;
  }

  ExprAst expr() {
    std::vector<ExprAst> terms;
    bool neg_first = lx.accept('-');
    ExprAst first = term();
    terms.push_back(neg_first ? negate(std::move(first)) : std::move(first));
    while (true) {
      if (lx.accept('+'))
        terms.push_back(term());
      else if (lx.accept('-'))
        terms.push_back(negate(term()));
      else
        break;
    }
    if (terms.size() == 1) return std::move(terms.front());
    ExprAst sum;
    sum.kind = ExprAst::Kind::Sum;
    sum.children = std::move(terms);
    return sum;
  }

  ExprAst term() {
    std::vector<ExprAst> factors;
    factors.push_back(factor());
    while (lx.accept('*')) factors.push_back(factor());
    if (factors.size() == 1) return std::move(factors.front());
    ExprAst prod;
    prod.kind = ExprAst::Kind::Product;
    prod.children = std::move(factors);
    return prod;
  }

  ExprAst factor() {
    ExprAst f = primary();
    while (lx.accept('\'')) {
      ExprAst a;
      a.kind = ExprAst::Kind::Adjoint;
      a.children.push_back(std::move(f));
      f = std::move(a);
    }
    return f;
  }

  ExprAst primary() {
    if (lx.peek() == '(') {
      // lookahead: "(re,im)" complex literal vs parenthesized expression
      size_t save = lx.pos;
      lx.accept('(');
      auto re = lx.number();
      if (re && lx.accept(',')) {
        auto im = lx.number();
        if (im && lx.accept(')')) {
          ExprAst sc;
          sc.kind = ExprAst::Kind::Scalar;
          sc.value = cpx(*re, *im);
          return sc;
        }
        lx.error("malformed complex literal");
      }
      lx.pos = save;
      lx.accept('(');
      ++paren_depth;
      ExprAst inner = expr();
      if (!lx.accept(')')) fail(Errc::UnbalancedParens, "expected ')' at position " + std::to_string(lx.pos));
      --paren_depth;
      return inner;
    }
    if (auto num = lx.number()) {
      ExprAst sc;
      sc.kind = ExprAst::Kind::Scalar;
      sc.value = cpx(*num, 0.0);
      return sc;
    }
    if (auto id = lx.ident()) {
      if (*id == "adj") {
        if (!lx.accept('(')) lx.error("adj requires '('");
        ++paren_depth;
        ExprAst inner = expr();
        if (!lx.accept(')')) fail(Errc::UnbalancedParens, "expected ')' at position " + std::to_string(lx.pos));
        --paren_depth;
        ExprAst a;
        a.kind = ExprAst::Kind::Adjoint;
        a.children.push_back(std::move(inner));
        return a;
      }
      ExprAst ref;
      ref.kind = ExprAst::Kind::SymbolRef;
      ref.name = *id;
      return ref;
    }
    if (lx.peek() == ')') fail(Errc::UnbalancedParens, "unexpected ')' at position " + std::to_string(lx.pos));
    lx.error("expected scalar, identifier or '('");
  }
};

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool is_negated_product(const ExprAst& e) {
  return e.kind == ExprAst::Kind::Product && !e.children.empty() &&
         e.children.front().kind == ExprAst::Kind::Scalar && e.children.front().value == cpx(-1.0, 0.0);
}

void print_node(const ExprAst& e, std::string& out, bool parenthesize_sums);

void print_product_tail(const ExprAst& prod, size_t from, std::string& out) {
  for (size_t i = from; i < prod.children.size(); ++i) {
    if (i > from) out += '*';
    print_node(prod.children[i], out, true);
  }
}

void print_node(const ExprAst& e, std::string& out, bool parenthesize_sums) {
  switch (e.kind) {
    case ExprAst::Kind::Scalar:
      if (e.value.imag() == 0.0 && e.value.real() >= 0.0)
        out += format_real(e.value.real());
      else
        out += "(" + format_real(e.value.real()) + "," + format_real(e.value.imag()) + ")";
      return;
    case ExprAst::Kind::SymbolRef:
      out += e.name;
      return;
    case ExprAst::Kind::Adjoint: {
      const ExprAst& c = e.children.front();
      if (c.kind == ExprAst::Kind::SymbolRef || c.kind == ExprAst::Kind::Scalar) {
        print_node(c, out, true);
      } else {
        out += '(';
        print_node(c, out, false);
        out += ')';
      }
      out += '\'';
      return;
    }
    case ExprAst::Kind::Product:
      print_product_tail(e, 0, out);
      return;
    case ExprAst::Kind::Sum: {
      if (parenthesize_sums) out += '(';
      for (size_t i = 0; i < e.children.size(); ++i) {
        const ExprAst& t = e.children[i];
        if (is_negated_product(t)) {
          out += (i == 0) ? "-" : " - ";
          if (t.children.size() == 2)
            print_node(t.children[1], out, true);
          else
            print_product_tail(t, 1, out);
        } else {
          if (i > 0) out += " + ";
          print_node(t, out, true);
        }
      }
      if (parenthesize_sums) out += ')';
      return;
    }
  }
}

} // namespace

ExprAst parse_polynomial(const std::string& text) {
  Parser p(text);
  if (p.lx.eof()) fail(Errc::SyntaxError, "empty expression");
  ExprAst ast = p.expr();
  if (!p.lx.eof()) {
    if (p.lx.peek() == ')') fail(Errc::UnbalancedParens, "unexpected ')' at position " + std::to_string(p.lx.pos));
    p.lx.error("trailing input");
  }
  return ast;
}

namespace {

ExprAst normalize(const ExprAst& e, bool under_adjoint) {
  switch (e.kind) {
    case ExprAst::Kind::Scalar: {
      ExprAst r = e;
      if (under_adjoint) r.value = std::conj(r.value);
      return r;
    }
    case ExprAst::Kind::SymbolRef: {
      if (!under_adjoint) return e;
      ExprAst a;
      a.kind = ExprAst::Kind::Adjoint;
      a.children.push_back(e);
      return a;
    }
    case ExprAst::Kind::Adjoint:
      return normalize(e.children.front(), !under_adjoint);
    case ExprAst::Kind::Sum: {
      ExprAst r;
      r.kind = ExprAst::Kind::Sum;
      for (const auto& c : e.children) r.children.push_back(normalize(c, under_adjoint));
      return r;
    }
    case ExprAst::Kind::Product: {
      ExprAst r;
      r.kind = ExprAst::Kind::Product;
      if (under_adjoint)
        for (auto it = e.children.rbegin(); it != e.children.rend(); ++it)
          r.children.push_back(normalize(*it, true));
      else
        for (const auto& c : e.children) r.children.push_back(normalize(c, false));
      return r;
    }
  }
  return e;
}

} // namespace

ExprAst normalize_adjoints(const ExprAst& ast) { return normalize(ast, false); }

std::string print_expr(const ExprAst& ast) {
  std::string out;
  print_node(ast, out, false);
  return out;
}

namespace {

std::vector<Monomial> expand(const ExprAst& e) {
  switch (e.kind) {
    case ExprAst::Kind::Scalar:
      return {Monomial{e.value, {}, {}}};
    case ExprAst::Kind::SymbolRef:
      return {Monomial{cpx(1.0), {Factor{e.name, false}}, {}}};
    case ExprAst::Kind::Adjoint: {
      std::vector<Monomial> inner = expand(e.children.front());
      for (auto& m : inner) {
        m.coeff = std::conj(m.coeff);
        m.word = adjoint_word(m.word);
      }
      return inner;
    }
    case ExprAst::Kind::Sum: {
      std::vector<Monomial> out;
      for (const auto& c : e.children) {
        auto part = expand(c);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case ExprAst::Kind::Product: {
      std::vector<Monomial> acc = {Monomial{cpx(1.0), {}, {}}};
      for (const auto& c : e.children) {
        auto part = expand(c);
        std::vector<Monomial> next;
        next.reserve(acc.size() * part.size());
        for (const auto& a : acc)
          for (const auto& b : part) {
            Monomial m;
            m.coeff = a.coeff * b.coeff;
            m.word = a.word;
            m.word.insert(m.word.end(), b.word.begin(), b.word.end());
            next.push_back(std::move(m));
          }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

} // namespace

Polynomial to_polynomial(const ExprAst& ast) {
  Polynomial p;
  p.monomials = expand(ast);
  return p;
}

} // namespace fdeq
