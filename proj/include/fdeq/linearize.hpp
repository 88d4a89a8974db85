#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fdeq/model.hpp"

namespace fdeq {

using Cell = std::pair<int, int>;

/// A deterministic term sitting in one cell of the linearization: a raw block
/// matrix together with its block position in the frame.
struct MatTerm {
  int row_block = 0;
  int col_block = 0;
  CMatrix matrix;
};

/// Self-adjoint linearization L = C + sum_x (E_x (x) + F_x (x*)) where C is an
/// m x m array of frame matrices (kept per freeness class) and E_x, F_x are
/// m x m scalar coefficient matrices.
struct Linearization {
  int m = 0;
  RectSpace space;
  int target_block = 0;

  struct DetCells {
    // scalar-of-projection content: cell -> coefficient per block (P_l multiples)
    std::map<Cell, std::vector<cpx>> proj;
    // matrix content: cell -> embedded block matrices
    std::map<Cell, std::vector<MatTerm>> mats;
    bool empty() const { return proj.empty() && mats.empty(); }
  };
  std::map<int, DetCells> det; // keyed by freeness class

  struct SymCoeff {
    CMatrix direct;  // coefficient of x
    CMatrix starred; // coefficient of x*
  };
  std::map<std::string, SymCoeff> coeff;
};

/// Staircase linearization of a single monomial (possibly non-self-adjoint);
/// consecutive deterministic letters of the same class are pre-multiplied, so
/// m equals the compressed factor count (a degree-0 monomial gives m = 1).
Linearization linearize_monomial(const ModelSpec& spec, const Monomial& mono);

/// Self-adjoint linearization of the whole polynomial. pre: spec validated and
/// free of Haar symbols.
Linearization linearize(const ModelSpec& spec);

struct FreeSummand {
  enum class Kind { Det, Semi };
  Kind kind = Kind::Det;
  int class_id = 0;
  std::string provenance;

  // Det
  Linearization::DetCells cells;

  // Semi: the element scale * (D (x) s) with s standard semicircular on `block`
  CMatrix semi_coeff;
  int block = 0;
  double scale = 1.0;
};

/// Split L into free summands: one DetPart per class (constants ride with
/// class 0), one SemiPart per semicircular symbol, two per circular symbol
/// with Hermitian coefficients (E+E*)/sqrt(2) and i(E-E*)/sqrt(2).
std::vector<FreeSummand> split_classes(const Linearization& lin, const ModelSpec& spec);

/// Full frame matrix of the deterministic cells (all classes summed).
CMatrix assemble_det_cells(const Linearization::DetCells& cells, const RectSpace& space, int m);

/// Assembled matrix of a purely deterministic linearization (throws if random
/// coefficients are present).
CMatrix assemble_linearization(const Linearization& lin);

} // namespace fdeq
