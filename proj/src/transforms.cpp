#include "fdeq/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace fdeq {

BElement& BElement::operator+=(const BElement& o) {
  if (blocks.size() != o.blocks.size()) fail(Errc::BadArgument, "block count mismatch");
  for (size_t l = 0; l < blocks.size(); ++l) blocks[l] += o.blocks[l];
  return *this;
}

BElement& BElement::operator-=(const BElement& o) {
  if (blocks.size() != o.blocks.size()) fail(Errc::BadArgument, "block count mismatch");
  for (size_t l = 0; l < blocks.size(); ++l) blocks[l] -= o.blocks[l];
  return *this;
}

BElement& BElement::operator*=(cpx s) {
  for (auto& b : blocks) b *= s;
  return *this;
}

BElement zero_b(int m, int nblocks) {
  BElement b;
  b.blocks.assign(nblocks, CMatrix(m, m));
  return b;
}

BElement lambda_embed(cpx z, double eps, int m, int nblocks) {
  if (!(z.imag() > 0.0) && !(eps > 0.0)) fail(Errc::BadArgument, "lambda_embed needs Im z > 0 or eps > 0");
  BElement b = zero_b(m, nblocks);
  for (auto& blk : b.blocks) {
    blk(0, 0) = z;
    for (int i = 1; i < m; ++i) blk(i, i) = cpx(0.0, eps);
  }
  return b;
}

BElement inverse_b(const BElement& b) {
  BElement r;
  r.blocks.reserve(b.blocks.size());
  for (const auto& blk : b.blocks) r.blocks.push_back(invert(blk));
  return r;
}

double max_norm(const BElement& b) {
  double m = 0;
  for (const auto& blk : b.blocks) m = std::max(m, max_abs(blk));
  return m;
}

double max_diff(const BElement& a, const BElement& b) {
  double m = 0;
  for (size_t l = 0; l < a.blocks.size(); ++l) m = std::max(m, max_abs(a.blocks[l] - b.blocks[l]));
  return m;
}

namespace {

CMatrix imaginary_part(const CMatrix& blk) {
  const int m = blk.rows();
  CMatrix im(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) im(i, j) = (blk(i, j) - std::conj(blk(j, i))) / cpx(0.0, 2.0);
  return im;
}

} // namespace

HalfPlaneCert half_plane_cert(const BElement& b) {
  HalfPlaneCert cert;
  cert.min_im = std::numeric_limits<double>::infinity();
  for (const auto& blk : b.blocks) {
    auto ev = herm_eig(imaginary_part(blk));
    cert.min_im = std::min(cert.min_im, ev.front());
  }
  return cert;
}

bool in_upper_closure(const BElement& b, double tol) {
  for (const auto& blk : b.blocks) {
    const CMatrix im = imaginary_part(blk);
    // Gershgorin lower bound first; exact eigenvalues only when inconclusive
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < im.rows(); ++i) {
      double radius = 0;
      for (int j = 0; j < im.cols(); ++j)
        if (j != i) radius += std::abs(im(i, j));
      lo = std::min(lo, im(i, i).real() - radius);
    }
    if (lo >= -tol) continue;
    if (herm_eig(im).front() < -tol) return false;
  }
  return true;
}

BElement h_transform(const BElement& g, const BElement& b) {
  BElement r = inverse_b(g);
  r -= b;
  return r;
}

// ---------------------------------------------------------------------------

DetEval::DetEval(const FreeSummand& part, const RectSpace& space, int m) : space_(space), m_(m) {
  if (part.kind != FreeSummand::Kind::Det) fail(Errc::BadArgument, "DetEval needs a Det summand");
  const int k1 = space.block_count();

  proj_coeff_.assign(size_t(m) * m, std::vector<cpx>(k1, cpx(0.0)));
  for (const auto& [cell, v] : part.cells.proj) {
    const auto [i, j] = cell;
    for (int l = 0; l < k1; ++l) proj_coeff_[size_t(i) * m + j][l] = v[l];
  }

  // spectral path: all matrix terms must be the same Hermitian square block
  fast_ = true;
  const CMatrix* shared = nullptr;
  pattern_ = CMatrix(m, m);
  for (const auto& [cell, terms] : part.cells.mats) {
    const auto [i, j] = cell;
    for (const auto& t : terms) {
      if (t.row_block != t.col_block) {
        fast_ = false;
        break;
      }
      if (!shared) {
        shared = &t.matrix;
        mat_block_ = t.row_block;
      }
      if (t.row_block != mat_block_ || !(t.matrix == *shared)) {
        fast_ = false;
        break;
      }
      pattern_(i, j) += 1.0;
    }
    if (!fast_) break;
  }
  if (fast_ && shared) {
    const double scale = std::max(1.0, max_abs(*shared));
    if (herm_defect(*shared) > 1e-12 * scale)
      fast_ = false;
    else
      mat_eigs_ = herm_eig(*shared);
  }
  if (part.cells.mats.empty()) {
    fast_ = true;
    mat_block_ = -1;
  }
  if (!fast_) assembled_ = assemble_det_cells(part.cells, space, m);
}

BElement DetEval::cauchy(const BElement& b) {
  return fast_ ? cauchy_spectral(b) : cauchy_general(b);
}

BElement DetEval::cauchy_general(const BElement& b) const {
  const int N = space_.total_dim;
  const int n = m_ * N;
  CMatrix M(n, n);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      for (int r = 0; r < N; ++r) M(i * N + r, j * N + r) = b.blocks[space_.block_of_index(r)](i, j);
  M -= assembled_;
  const CMatrix inv = invert(M);
  BElement g = zero_b(m_, space_.block_count());
  for (int l = 0; l < space_.block_count(); ++l) {
    const int off = space_.block_offset(l);
    const double w = 1.0 / space_.block_dims[l];
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) {
        cpx s = 0;
        for (int r = 0; r < space_.block_dims[l]; ++r) s += inv(i * N + off + r, j * N + off + r);
        g.blocks[l](i, j) = w * s;
      }
  }
  return g;
}

BElement DetEval::cauchy_spectral(const BElement& b) const {
  const int k1 = space_.block_count();
  BElement g = zero_b(m_, k1);
  for (int l = 0; l < k1; ++l) {
    CMatrix base(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) base(i, j) = b.blocks[l](i, j) - proj_coeff_[size_t(i) * m_ + j][l];
    if (l != mat_block_) {
      g.blocks[l] = invert(base);
      continue;
    }
    const int nl = space_.block_dims[l];
    CMatrix acc(m_, m_);
    for (int q = 0; q < nl; ++q) {
      CMatrix a = base;
      const double lam = mat_eigs_[q];
      if (lam != 0.0)
        for (int i = 0; i < m_; ++i)
          for (int j = 0; j < m_; ++j) a(i, j) -= lam * pattern_(i, j);
      acc += invert(a);
    }
    acc *= cpx(1.0 / nl);
    g.blocks[l] = acc;
  }
  return g;
}

SemiEval::SemiEval(const FreeSummand& part, const QuadratureRule& rule, int nblocks)
    : coeff_(part.semi_coeff), block_(part.block), scale_(part.scale), rule_(rule), nblocks_(nblocks) {
  if (part.kind != FreeSummand::Kind::Semi) fail(Errc::BadArgument, "SemiEval needs a Semi summand");
  const double s = std::max(1.0, max_abs(coeff_));
  if (herm_defect(coeff_) > 1e-12 * s) fail(Errc::BadArgument, "semicircular coefficient not Hermitian");
  // spectral-norm bound for the pole-distance estimate
  double row_sum = 0;
  for (int i = 0; i < coeff_.rows(); ++i) {
    double r = 0;
    for (int j = 0; j < coeff_.cols(); ++j) r += std::abs(coeff_(i, j));
    row_sum = std::max(row_sum, r);
  }
  coeff_norm_ = std::abs(scale_) * row_sum;
  midpoint_ = rule.kind == QuadratureRule::Kind::Midpoint;
}

const QuadratureRule& SemiEval::rule_at(int n) {
  if (n == int(rule_.nodes.size())) return rule_;
  // shared across evaluators: levels are few and read-only once built
  static std::mutex mutex;
  static std::map<std::pair<int, bool>, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(n, midpoint_);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, midpoint_ ? semicircle_midpoint_rule(n) : semicircle_rule(n)).first;
  return it->second;
}

CMatrix SemiEval::integrate(const CMatrix& arg, const QuadratureRule& rule) const {
  const int m = arg.rows();
  CMatrix acc(m, m);
  std::vector<cpx> work(size_t(m) * m);
  std::vector<int> piv(m);
  const cpx* ap = arg.data();
  const cpx* dp = coeff_.data();
  for (size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = scale_ * rule.nodes[q];
    for (size_t e = 0; e < work.size(); ++e) work[e] = ap[e] - t * dp[e];
    if (!invert_small_inplace(work.data(), m, piv.data()))
      fail(Errc::Singular, "semicircle quadrature node resolvent is singular");
    const double w = rule.weights[q];
    cpx* acc_p = acc.data();
    for (size_t e = 0; e < work.size(); ++e) acc_p[e] += w * work[e];
  }
  return acc;
}

BElement SemiEval::cauchy(const BElement& b) {
  const int m = b.m();
  BElement g = zero_b(m, nblocks_);
  for (int l = 0; l < nblocks_; ++l) {
    if (l != block_) {
      g.blocks[l] = invert(b.blocks[l]);
      continue;
    }
    const int base = int(rule_.nodes.size());
    // the midpoint mode is the plain Riemann cross-check: fixed order, no
    // refinement (the distance criterion below is specific to Gauss rules)
    bool provably_fine = coeff_norm_ == 0.0 || midpoint_;
    if (!provably_fine) {
      // worst-case pole distance; when the base rule provably resolves it a
      // single pass stands, otherwise run an error-controlled ladder
      const CMatrix im = imaginary_part(b.blocks[l]);
      const double dist = herm_eig(im).front() / coeff_norm_;
      provably_fine = dist > 0 && dist >= 10.0 / base;
    }
    if (provably_fine) {
      last_order_ = base;
      g.blocks[l] = integrate(b.blocks[l], rule_);
      continue;
    }
    constexpr int kCap = 1 << 18;
    // resume near the level the previous evaluation needed; arguments move
    // slowly inside one subordination solve
    int level = std::max(base, cruise_);
    CMatrix cur = integrate(b.blocks[l], rule_at(level));
    CMatrix check = integrate(b.blocks[l], rule_at(std::max(level / 2, 1)));
    double step = max_abs(cur - check);
    while (step > accuracy_ * std::max(1.0, max_abs(cur)) && level < kCap) {
      level *= 2;
      CMatrix next = integrate(b.blocks[l], rule_at(level));
      step = max_abs(next - cur);
      cur = std::move(next);
    }
    last_order_ = level;
    cruise_ = std::max(base, level / 2); // decay so the level can come back down
    g.blocks[l] = std::move(cur);
  }
  return g;
}

void SemiEval::set_accuracy(double a) {
  accuracy_ = std::clamp(a, 1e-11, 1e-6);
}

std::unique_ptr<CauchyEval> make_eval(const FreeSummand& part, const RectSpace& space, int m,
                                      const QuadratureRule& rule) {
  if (part.kind == FreeSummand::Kind::Det) return std::make_unique<DetEval>(part, space, m);
  return std::make_unique<SemiEval>(part, rule, space.block_count());
}

BElement cauchy_det(const FreeSummand& part, const RectSpace& space, int m, const BElement& b) {
  return DetEval(part, space, m).cauchy(b);
}

BElement cauchy_semi(const FreeSummand& part, const BElement& b, const QuadratureRule& rule) {
  return SemiEval(part, rule, int(b.blocks.size())).cauchy(b);
}

} // namespace fdeq
