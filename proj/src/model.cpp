#include "fdeq/model.hpp"

#include <algorithm>
#include <set>

namespace fdeq {

int RectSpace::block_of_index(int r) const {
  for (int l = 0; l < block_count(); ++l)
    if (r < offsets[l] + block_dims[l]) return l;
  fail(Errc::BadArgument, "frame index out of range");
}

RectSpace make_rect_space(std::vector<int> dims) {
  if (dims.empty()) fail(Errc::BadArgument, "need at least one block");
  RectSpace s;
  s.block_dims = std::move(dims);
  for (int n : s.block_dims) {
    if (n < 1) fail(Errc::BadArgument, "block sizes must be >= 1");
    s.offsets.push_back(s.total_dim);
    s.total_dim += n;
  }
  for (int n : s.block_dims) s.weights.push_back(double(n) / s.total_dim);
  return s;
}

const char* kind_name(SymbolKind k) {
  switch (k) {
    case SymbolKind::Deterministic: return "deterministic";
    case SymbolKind::Circular: return "circular";
    case SymbolKind::Semicircular: return "semicircular";
    case SymbolKind::HaarUnitary: return "haar";
  }
  return "?";
}

bool Symbol::self_adjoint_letter() const {
  if (kind == SymbolKind::Semicircular) return true;
  if (kind != SymbolKind::Deterministic) return false;
  return row_block == col_block && matrix.square() && herm_defect(matrix) == 0.0;
}

Word adjoint_word(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (auto& f : r) f.adj = !f.adj;
  return r;
}

Word canonical_word(const ModelSpec& spec, Word w) {
  for (auto& f : w) {
    auto it = spec.symbols.find(f.symbol);
    if (it == spec.symbols.end()) fail(Errc::UnknownSymbol, "symbol '" + f.symbol + "' not defined");
    if (f.adj && it->second.self_adjoint_letter()) f.adj = false;
  }
  return w;
}

namespace {

const Symbol& lookup(const ModelSpec& spec, const std::string& name) {
  auto it = spec.symbols.find(name);
  if (it == spec.symbols.end()) fail(Errc::UnknownSymbol, "symbol '" + name + "' not defined");
  return it->second;
}

std::pair<int, int> factor_blocks(const Symbol& s, bool adj) {
  if (adj) return {s.col_block, s.row_block};
  return {s.row_block, s.col_block};
}

bool word_less(const Word& a, const Word& b) { return a < b; }

void canonicalize(ModelSpec& spec) {
  for (auto& mono : spec.polynomial.monomials) mono.word = canonical_word(spec, std::move(mono.word));

  std::sort(spec.polynomial.monomials.begin(), spec.polynomial.monomials.end(),
            [](const Monomial& a, const Monomial& b) { return word_less(a.word, b.word); });
  std::vector<Monomial> out;
  for (auto& mono : spec.polynomial.monomials) {
    if (!out.empty() && out.back().word == mono.word)
      out.back().coeff += mono.coeff;
    else
      out.push_back(mono);
  }
  std::erase_if(out, [](const Monomial& m) { return m.coeff == cpx(0.0); });
  spec.polynomial.monomials = std::move(out);
}

void check_chains(ModelSpec& spec) {
  const int t = spec.target_block;
  if (t < 0 || t >= spec.space.block_count()) fail(Errc::BadArgument, "target_block out of range");
  for (auto& mono : spec.polynomial.monomials) {
    mono.block_trace.clear();
    if (mono.word.empty()) {
      mono.block_trace = {t, t};
      continue;
    }
    int prev_col = -1;
    for (size_t i = 0; i < mono.word.size(); ++i) {
      const Symbol& s = lookup(spec, mono.word[i].symbol);
      if (s.kind == SymbolKind::Deterministic) {
        const auto [nr, nc] = std::pair{spec.space.block_dims[s.row_block], spec.space.block_dims[s.col_block]};
        if (s.matrix.rows() != nr || s.matrix.cols() != nc)
          fail(Errc::BadMatrixShape, "matrix '" + s.name + "' does not match its blocks");
      }
      const auto [rb, cb] = factor_blocks(s, mono.word[i].adj);
      if (i == 0)
        mono.block_trace.push_back(rb);
      else if (rb != prev_col)
        fail(Errc::BlockMismatch, "factor '" + mono.word[i].symbol + "' expects row block " +
                                      std::to_string(rb) + " but previous factor ends at block " +
                                      std::to_string(prev_col));
      mono.block_trace.push_back(cb);
      prev_col = cb;
    }
  }
}

void check_outer_blocks(ModelSpec& spec) {
  const int t = spec.target_block;
  for (const auto& mono : spec.polynomial.monomials)
    if (mono.block_trace.front() != t || mono.block_trace.back() != t)
      fail(Errc::BlockMismatch, "monomial outer blocks (" + std::to_string(mono.block_trace.front()) +
                                    "," + std::to_string(mono.block_trace.back()) +
                                    ") differ from target block " + std::to_string(t));
  spec.polynomial.row_block = t;
  spec.polynomial.col_block = t;
}

void check_self_adjoint(const ModelSpec& spec) {
  std::vector<std::pair<Word, cpx>> plain, adj;
  for (const auto& m : spec.polynomial.monomials) {
    plain.emplace_back(m.word, m.coeff);
    adj.emplace_back(canonical_word(spec, adjoint_word(m.word)), std::conj(m.coeff));
  }
  auto cmp = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.real() != b.second.real()) return a.second.real() < b.second.real();
    return a.second.imag() < b.second.imag();
  };
  std::sort(plain.begin(), plain.end(), cmp);
  std::sort(adj.begin(), adj.end(), cmp);
  if (plain != adj) fail(Errc::NotSelfAdjoint, "polynomial differs from its formal adjoint");
}

void assign_classes(ModelSpec& spec) {
  std::set<std::string> used;
  for (const auto& m : spec.polynomial.monomials)
    for (const auto& f : m.word) used.insert(f.symbol);
  int next = 1;
  for (auto& [name, sym] : spec.symbols) {
    (void)name;
    if (sym.random())
      sym.class_id = next++;
    else
      sym.class_id = 0;
  }
  (void)used;
}

} // namespace

ModelSpec validate(ModelSpec spec) {
  for (const auto& m : spec.polynomial.monomials)
    for (const auto& f : m.word) lookup(spec, f.symbol);
  canonicalize(spec);
  check_chains(spec);
  check_self_adjoint(spec);
  check_outer_blocks(spec);
  if (!spec.validated) assign_classes(spec); // keep classes stable across re-validation
  spec.validated = true;
  return spec;
}

namespace {

void simplify_unitarity(const ModelSpec& spec, Word& w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i].symbol != w[i + 1].symbol) continue;
      if (lookup(spec, w[i].symbol).kind != SymbolKind::HaarUnitary) continue;
      if (w[i].adj == w[i + 1].adj) continue;
      w.erase(w.begin() + i, w.begin() + i + 2);
      changed = true;
      break;
    }
  }
}

} // namespace

ModelSpec eliminate_haar(ModelSpec spec) {
  spec = validate(std::move(spec));
  int next_class = 0;
  for (const auto& [name, sym] : spec.symbols) {
    (void)name;
    next_class = std::max(next_class, sym.class_id + 1);
  }

  // clone cache: (symbol, haar class) -> clone name
  std::map<std::pair<std::string, int>, std::string> clones;
  auto clone_into = [&](const std::string& orig, int haar_class) -> std::string {
    auto key = std::make_pair(orig, haar_class);
    auto it = clones.find(key);
    if (it != clones.end()) return it->second;
    const Symbol& src = spec.symbols.at(orig);
    Symbol c = src;
    c.name = orig + "~r" + std::to_string(haar_class);
    c.class_id = src.random() ? next_class++ : haar_class;
    spec.symbols.emplace(c.name, c);
    clones.emplace(key, c.name);
    return c.name;
  };

  for (auto& mono : spec.polynomial.monomials) {
    simplify_unitarity(spec, mono.word);
    size_t i = 0;
    while (i < mono.word.size()) {
      const Symbol& s = lookup(spec, mono.word[i].symbol);
      if (s.kind != SymbolKind::HaarUnitary) {
        ++i;
        continue;
      }
      // partner must be the next Haar letter: same symbol, opposite flag
      size_t j = i + 1;
      while (j < mono.word.size() && lookup(spec, mono.word[j].symbol).kind != SymbolKind::HaarUnitary) ++j;
      if (j >= mono.word.size() || mono.word[j].symbol != mono.word[i].symbol ||
          mono.word[j].adj == mono.word[i].adj)
        fail(Errc::UnsupportedHaarUsage,
             "'" + mono.word[i].symbol + "' is not part of a matched sandwich u W u*");
      Word inner(mono.word.begin() + i + 1, mono.word.begin() + j);
      for (auto& f : inner) f.symbol = clone_into(f.symbol, s.class_id);
      mono.word.erase(mono.word.begin() + i, mono.word.begin() + j + 1);
      mono.word.insert(mono.word.begin() + i, inner.begin(), inner.end());
      i += inner.size();
    }
  }

  // drop symbols the rewritten polynomial no longer references
  std::set<std::string> used;
  for (const auto& m : spec.polynomial.monomials)
    for (const auto& f : m.word) used.insert(f.symbol);
  std::erase_if(spec.symbols, [&](const auto& kv) { return !used.contains(kv.first); });

  canonicalize(spec);
  check_chains(spec);
  check_self_adjoint(spec);
  check_outer_blocks(spec);
  return spec;
}

CMatrix embed_block(const RectSpace& space, const CMatrix& m, int row_block, int col_block) {
  if (m.rows() != space.block_dims[row_block] || m.cols() != space.block_dims[col_block])
    fail(Errc::BadMatrixShape, "embedding shape mismatch");
  CMatrix out(space.total_dim, space.total_dim);
  const int r0 = space.block_offset(row_block), c0 = space.block_offset(col_block);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(r0 + i, c0 + j) = m(i, j);
  return out;
}

CMatrix assemble_deterministic(const ModelSpec& spec) {
  const int n = spec.space.total_dim;
  CMatrix acc(n, n);
  for (const auto& mono : spec.polynomial.monomials) {
    CMatrix prod;
    if (mono.word.empty()) {
      CMatrix id(spec.space.block_dims[spec.target_block], spec.space.block_dims[spec.target_block]);
      for (int i = 0; i < id.rows(); ++i) id(i, i) = 1.0;
      prod = embed_block(spec.space, id, spec.target_block, spec.target_block);
    } else {
      for (const auto& f : mono.word) {
        const Symbol& s = spec.symbols.at(f.symbol);
        if (s.kind != SymbolKind::Deterministic)
          fail(Errc::BadArgument, "assemble_deterministic on a model with random symbols");
        CMatrix factor = embed_block(spec.space, f.adj ? adjoint(s.matrix) : s.matrix,
                                     f.adj ? s.col_block : s.row_block, f.adj ? s.row_block : s.col_block);
        prod = prod.empty() ? std::move(factor) : mul(prod, factor);
      }
    }
    prod *= mono.coeff;
    acc += prod;
  }
  return acc;
}

} // namespace fdeq
