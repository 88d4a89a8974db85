#include "fdeq/linearize.hpp"

#include <algorithm>
#include <cmath>

namespace fdeq {

namespace {

struct LinFactor {
  enum class Tag { Det, ProjScalar, Rand };
  Tag tag = Tag::Det;
  // Det
  CMatrix raw;
  int row_block = 0, col_block = 0, class_id = 0;
  // ProjScalar: value * I restricted to `block`
  cpx value{0.0};
  int block = 0;
  // Rand
  std::string symbol;
  bool adj = false;
  cpx scalar{1.0};
};

LinFactor adjoint_factor(const LinFactor& f) {
  LinFactor r = f;
  switch (f.tag) {
    case LinFactor::Tag::Det:
      r.raw = adjoint(f.raw);
      r.row_block = f.col_block;
      r.col_block = f.row_block;
      break;
    case LinFactor::Tag::ProjScalar:
      r.value = std::conj(f.value);
      break;
    case LinFactor::Tag::Rand:
      r.adj = !f.adj;
      r.scalar = std::conj(f.scalar);
      break;
  }
  return r;
}

LinFactor det_factor(const Symbol& s, bool adj) {
  LinFactor f;
  f.tag = LinFactor::Tag::Det;
  f.raw = adj ? adjoint(s.matrix) : s.matrix;
  f.row_block = adj ? s.col_block : s.row_block;
  f.col_block = adj ? s.row_block : s.col_block;
  f.class_id = s.class_id;
  return f;
}

/// Compress a letter range into factors, pre-multiplying runs of deterministic
/// letters that share a freeness class.
std::vector<LinFactor> compress(const ModelSpec& spec, const Word& w, size_t lo, size_t hi) {
  std::vector<LinFactor> out;
  for (size_t i = lo; i < hi; ++i) {
    const Symbol& s = spec.symbols.at(w[i].symbol);
    if (s.kind == SymbolKind::Deterministic) {
      LinFactor f = det_factor(s, w[i].adj);
      if (!out.empty() && out.back().tag == LinFactor::Tag::Det && out.back().class_id == f.class_id) {
        out.back().raw = mul(out.back().raw, f.raw);
        out.back().col_block = f.col_block;
      } else {
        out.push_back(std::move(f));
      }
    } else {
      LinFactor f;
      f.tag = LinFactor::Tag::Rand;
      f.symbol = s.name;
      f.adj = w[i].adj;
      out.push_back(std::move(f));
    }
  }
  return out;
}

bool pure_det_single_class(const ModelSpec& spec, const Word& w, int* cls) {
  int seen = -1;
  for (const auto& f : w) {
    const Symbol& s = spec.symbols.at(f.symbol);
    if (s.kind != SymbolKind::Deterministic) return false;
    if (seen == -1)
      seen = s.class_id;
    else if (seen != s.class_id)
      return false;
  }
  *cls = seen;
  return true;
}

CMatrix raw_word_product(const ModelSpec& spec, const Word& w) {
  CMatrix prod;
  for (const auto& f : w) {
    const Symbol& s = spec.symbols.at(f.symbol);
    CMatrix factor = f.adj ? adjoint(s.matrix) : s.matrix;
    prod = prod.empty() ? std::move(factor) : mul(prod, factor);
  }
  return prod;
}

struct Assembler {
  Linearization lin;
  const ModelSpec& spec;
  int next_row = 1;

  struct RandPlacement {
    int i, j;
    std::string symbol;
    bool adj;
    cpx scalar;
  };
  std::vector<RandPlacement> rand_buf;

  explicit Assembler(const ModelSpec& s) : spec(s) {
    lin.space = s.space;
    lin.target_block = s.target_block;
  }

  void place(int i, int j, const LinFactor& f) {
    switch (f.tag) {
      case LinFactor::Tag::Det: {
        lin.det[f.class_id].mats[{i, j}].push_back(MatTerm{f.row_block, f.col_block, f.raw});
        return;
      }
      case LinFactor::Tag::ProjScalar: {
        auto& v = lin.det[f.class_id].proj[{i, j}];
        if (v.empty()) v.assign(spec.space.block_count(), cpx(0.0));
        v[f.block] += f.value;
        return;
      }
      case LinFactor::Tag::Rand:
        rand_buf.push_back(RandPlacement{i, j, f.symbol, f.adj, f.scalar});
        return;
    }
  }

  void place_minus_one(int i, int j) {
    auto& v = lin.det[0].proj[{i, j}];
    if (v.empty()) v.assign(spec.space.block_count(), cpx(0.0));
    for (auto& x : v) x -= 1.0;
  }

  void add_corner(const LinFactor& f) { place(0, 0, f); }

  /// Staircase for a factor list (n >= 2): factor p at (p, n-1-p), -1 at (p, n-p).
  void add_staircase(const std::vector<LinFactor>& fs) {
    const int n = int(fs.size());
    const int base = next_row;
    next_row += n - 1;
    auto g = [&](int local) { return local == 0 ? 0 : base + local - 1; };
    for (int p = 0; p < n; ++p) place(g(p), g(n - 1 - p), fs[p]);
    for (int p = 1; p < n; ++p) place_minus_one(g(p), g(n - p));
  }

  /// q + q* from the staircase of q = fs (n >= 2): rows split into the mirror
  /// copies [[0,u,v*],[u*,0,Q*],[v,Q,0]].
  void add_symmetrized(const std::vector<LinFactor>& fs) {
    const int n = int(fs.size());
    const int baseA = next_row;
    const int baseB = next_row + (n - 1);
    next_row += 2 * (n - 1);
    auto A = [&](int local) { return baseA + local - 1; };
    auto B = [&](int local) { return baseB + local - 1; };

    auto emit = [&](int a, int b, const LinFactor& c) {
      if (a == 0) { // u_b
        place(0, A(b), c);
        place(A(b), 0, adjoint_factor(c));
      } else if (b == 0) { // v_a
        place(B(a), 0, c);
        place(0, B(a), adjoint_factor(c));
      } else { // Q_ab
        place(B(a), A(b), c);
        place(A(b), B(a), adjoint_factor(c));
      }
    };

    for (int p = 0; p < n; ++p) emit(p, n - 1 - p, fs[p]);
    LinFactor minus_one;
    minus_one.tag = LinFactor::Tag::ProjScalar;
    minus_one.class_id = 0;
    for (int p = 1; p < n; ++p) {
      // -1 on every block
      for (int l = 0; l < spec.space.block_count(); ++l) {
        LinFactor f = minus_one;
        f.value = cpx(-1.0);
        f.block = l;
        emit(p, n - p, f);
      }
    }
  }

  Linearization finish() {
    lin.m = next_row;
    for (const auto& rp : rand_buf) {
      auto& sc = lin.coeff[rp.symbol];
      if (sc.direct.empty()) {
        sc.direct = CMatrix(lin.m, lin.m);
        sc.starred = CMatrix(lin.m, lin.m);
      }
      (rp.adj ? sc.starred : sc.direct)(rp.i, rp.j) += rp.scalar;
    }
    std::erase_if(lin.det, [](const auto& kv) { return kv.second.empty(); });
    return std::move(lin);
  }
};

void require_no_haar(const ModelSpec& spec) {
  for (const auto& [name, s] : spec.symbols) {
    (void)name;
    if (s.kind == SymbolKind::HaarUnitary)
      fail(Errc::BadArgument, "linearize requires eliminate_haar to run first");
  }
}

} // namespace

Linearization linearize_monomial(const ModelSpec& spec, const Monomial& mono) {
  require_no_haar(spec);
  Assembler as(spec);
  if (mono.word.empty()) {
    LinFactor f;
    f.tag = LinFactor::Tag::ProjScalar;
    f.value = mono.coeff;
    f.block = spec.target_block;
    f.class_id = 0;
    as.add_corner(f);
    return as.finish();
  }
  std::vector<LinFactor> fs = compress(spec, mono.word, 0, mono.word.size());
  // absorb the coefficient into the first factor
  if (fs.front().tag == LinFactor::Tag::Det)
    fs.front().raw *= mono.coeff;
  else
    fs.front().scalar = mono.coeff;
  if (fs.size() == 1)
    as.add_corner(fs.front());
  else
    as.add_staircase(fs);
  return as.finish();
}

Linearization linearize(const ModelSpec& spec) {
  if (!spec.validated) fail(Errc::BadArgument, "linearize requires a validated spec");
  require_no_haar(spec);

  Assembler as(spec);
  const auto& monos = spec.polynomial.monomials;
  std::map<Word, size_t> by_word;
  for (size_t i = 0; i < monos.size(); ++i) by_word[monos[i].word] = i;
  std::vector<bool> done(monos.size(), false);

  for (size_t i = 0; i < monos.size(); ++i) {
    if (done[i]) continue;
    done[i] = true;
    const Monomial& mono = monos[i];
    const Word aw = canonical_word(spec, adjoint_word(mono.word));

    if (aw == mono.word) {
      if (mono.coeff.imag() != 0.0)
        fail(Errc::NotSelfAdjoint, "palindromic monomial with non-real coefficient");
      const double alpha = mono.coeff.real();

      if (mono.word.empty()) {
        LinFactor f;
        f.tag = LinFactor::Tag::ProjScalar;
        f.value = alpha;
        f.block = spec.target_block;
        f.class_id = 0;
        as.add_corner(f);
        continue;
      }
      int cls = 0;
      if (pure_det_single_class(spec, mono.word, &cls)) {
        // Hermitian corner pair (alpha/2) W + adjoint
        CMatrix half = raw_word_product(spec, mono.word);
        half *= cpx(alpha / 2.0);
        LinFactor f;
        f.tag = LinFactor::Tag::Det;
        f.raw = half;
        f.row_block = f.col_block = spec.target_block;
        f.class_id = cls;
        as.add_corner(f);
        as.add_corner(adjoint_factor(f));
        continue;
      }

      // mirrored build: right half is the exact adjoint of the left half
      const size_t W = mono.word.size();
      const size_t h = W / 2;
      const bool odd = (W % 2) != 0;
      std::vector<LinFactor> left = compress(spec, mono.word, 0, h);
      std::vector<LinFactor> fs = left;
      if (odd) {
        const Factor& midf = mono.word[h];
        const Symbol& s = spec.symbols.at(midf.symbol);
        LinFactor mid;
        if (s.kind == SymbolKind::Deterministic) {
          mid = det_factor(s, midf.adj);
          mid.raw *= cpx(alpha);
        } else {
          mid.tag = LinFactor::Tag::Rand;
          mid.symbol = s.name;
          mid.adj = midf.adj;
          mid.scalar = alpha;
        }
        fs.push_back(std::move(mid));
      } else if (alpha != 1.0) {
        const Symbol& s = spec.symbols.at(mono.word[h - 1].symbol);
        LinFactor mid;
        mid.tag = LinFactor::Tag::ProjScalar;
        mid.value = alpha;
        mid.block = mono.word[h - 1].adj ? s.row_block : s.col_block;
        mid.class_id = 0;
        fs.push_back(std::move(mid));
      }
      for (auto it = left.rbegin(); it != left.rend(); ++it) fs.push_back(adjoint_factor(*it));

      if (fs.size() == 1)
        as.add_corner(fs.front());
      else
        as.add_staircase(fs);
      continue;
    }

    // paired monomial: find the adjoint partner and build q + q* from this one
    auto it = by_word.find(aw);
    if (it == by_word.end() || monos[it->second].coeff != std::conj(mono.coeff))
      fail(Errc::NotSelfAdjoint, "monomial lacks its adjoint partner");
    done[it->second] = true;

    std::vector<LinFactor> fs = compress(spec, mono.word, 0, mono.word.size());
    if (fs.front().tag == LinFactor::Tag::Det)
      fs.front().raw *= mono.coeff;
    else
      fs.front().scalar = mono.coeff;

    if (fs.size() == 1) {
      as.add_corner(fs.front());
      as.add_corner(adjoint_factor(fs.front()));
    } else {
      as.add_symmetrized(fs);
    }
  }
  return as.finish();
}

std::vector<FreeSummand> split_classes(const Linearization& lin, const ModelSpec& spec) {
  std::vector<FreeSummand> out;
  for (const auto& [cls, cells] : lin.det) {
    FreeSummand s;
    s.kind = FreeSummand::Kind::Det;
    s.class_id = cls;
    s.cells = cells;
    for (const auto& [name, sym] : spec.symbols)
      if (!sym.random() && sym.class_id == cls) s.provenance += (s.provenance.empty() ? "" : ",") + name;
    if (cls == 0) s.provenance += (s.provenance.empty() ? "constants" : ",constants");
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.class_id < b.class_id; });

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& [name, sc] : lin.coeff) {
    const Symbol& sym = spec.symbols.at(name);
    if (sym.kind == SymbolKind::Semicircular) {
      if (max_abs(sc.starred) != 0.0) fail(Errc::BadArgument, "semicircular symbol with starred coefficient");
      FreeSummand s;
      s.kind = FreeSummand::Kind::Semi;
      s.class_id = sym.class_id;
      s.semi_coeff = sc.direct;
      s.block = sym.row_block;
      s.provenance = name;
      out.push_back(std::move(s));
    } else if (sym.kind == SymbolKind::Circular) {
      const CMatrix E = sc.direct;
      const CMatrix Eadj = adjoint(E);
      if (max_abs(sc.starred - Eadj) != 0.0)
        fail(Errc::BadArgument, "circular coefficients are not adjoint-paired");
      FreeSummand s1;
      s1.kind = FreeSummand::Kind::Semi;
      s1.class_id = sym.class_id;
      s1.semi_coeff = inv_sqrt2 * (E + Eadj);
      s1.block = sym.row_block;
      s1.provenance = name + ":re";
      FreeSummand s2 = s1;
      s2.semi_coeff = cpx(0.0, inv_sqrt2) * (E - Eadj);
      s2.provenance = name + ":im";
      out.push_back(std::move(s1));
      out.push_back(std::move(s2));
    } else {
      fail(Errc::BadArgument, "unexpected random symbol kind in split_classes");
    }
  }
  return out;
}

CMatrix assemble_det_cells(const Linearization::DetCells& cells, const RectSpace& space, int m) {
  const int N = space.total_dim;
  CMatrix out(m * N, m * N);
  for (const auto& [cell, v] : cells.proj) {
    const auto [i, j] = cell;
    for (int l = 0; l < space.block_count(); ++l) {
      if (v[l] == cpx(0.0)) continue;
      const int off = space.block_offset(l);
      for (int r = 0; r < space.block_dims[l]; ++r) out(i * N + off + r, j * N + off + r) += v[l];
    }
  }
  for (const auto& [cell, terms] : cells.mats) {
    const auto [i, j] = cell;
    for (const auto& t : terms) {
      const int r0 = space.block_offset(t.row_block), c0 = space.block_offset(t.col_block);
      for (int r = 0; r < t.matrix.rows(); ++r)
        for (int c = 0; c < t.matrix.cols(); ++c) out(i * N + r0 + r, j * N + c0 + c) += t.matrix(r, c);
    }
  }
  return out;
}

CMatrix assemble_linearization(const Linearization& lin) {
  if (!lin.coeff.empty()) fail(Errc::BadArgument, "linearization has random coefficients");
  CMatrix out(lin.m * lin.space.total_dim, lin.m * lin.space.total_dim);
  for (const auto& [cls, cells] : lin.det) {
    (void)cls;
    out += assemble_det_cells(cells, lin.space, lin.m);
  }
  return out;
}

} // namespace fdeq
