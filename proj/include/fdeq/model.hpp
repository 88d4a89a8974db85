#pragma once

#include <map>
#include <string>
#include <vector>

#include "fdeq/complexmat.hpp"

namespace fdeq {

/// Rectangular space: orthogonal blocks of sizes n_0..n_k inside an
/// (n_0+...+n_k)-dimensional frame.
struct RectSpace {
  std::vector<int> block_dims;
  int total_dim = 0;
  std::vector<double> weights;
  std::vector<int> offsets;

  int block_count() const { return int(block_dims.size()); }
  int block_offset(int l) const { return offsets[l]; }
  int block_of_index(int r) const;
};

RectSpace make_rect_space(std::vector<int> dims);

enum class SymbolKind { Deterministic, Circular, Semicircular, HaarUnitary };

const char* kind_name(SymbolKind k);

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Deterministic;
  int row_block = 0;
  int col_block = 0;
  CMatrix matrix; // deterministic only
  int class_id = 0;

  bool random() const { return kind != SymbolKind::Deterministic; }
  /// Semicircular elements and deterministic symbols with an exactly Hermitian
  /// matrix are treated as self-adjoint letters (x* canonicalizes to x).
  bool self_adjoint_letter() const;
};

struct Factor {
  std::string symbol;
  bool adj = false;

  bool operator==(const Factor&) const = default;
  auto operator<=>(const Factor&) const = default;
};

using Word = std::vector<Factor>;

Word adjoint_word(const Word& w);

struct Monomial {
  cpx coeff{1.0, 0.0};
  Word word;
  std::vector<int> block_trace; // annotated by validate: blocks along the chain, size |word|+1
};

struct Polynomial {
  std::vector<Monomial> monomials;
  int row_block = -1;
  int col_block = -1; // outer blocks, annotated by validate
};

struct ModelSpec {
  RectSpace space;
  std::map<std::string, Symbol> symbols;
  Polynomial polynomial;
  int target_block = 0;
  bool validated = false;
};

/// Drop adjoint flags on self-adjoint letters (needs the model's symbol table).
Word canonical_word(const ModelSpec& spec, Word w);

/// Checks dimension chains, outer blocks and symbolic self-adjointness;
/// canonicalizes adjoint flags and combines like monomials; assigns freeness
/// classes (0 for deterministic symbols, a fresh class per random symbol).
ModelSpec validate(ModelSpec spec);

/// Rewrites every Haar sandwich u W u* into W with the symbols of W cloned into
/// the fresh class owned by u. The result contains no Haar symbols.
ModelSpec eliminate_haar(ModelSpec spec);

/// Embed an (n_r x n_c) matrix at block position (r, c) of the full frame.
CMatrix embed_block(const RectSpace& space, const CMatrix& m, int row_block, int col_block);

/// Numerical value of the polynomial under symbol -> matrix assignment, as the
/// full-frame matrix. Random symbols must be assigned too (used by tests and
/// the Monte Carlo sampler at blow-up factor 1).
CMatrix assemble_deterministic(const ModelSpec& spec);

} // namespace fdeq
