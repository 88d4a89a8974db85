#include "fdeq/convolve.hpp"

#include <algorithm>
#include <cmath>

namespace fdeq {

namespace {
constexpr double kHalfPlaneSlack = 1e-12;
}

BElement free_add(CauchyEval& gx, CauchyEval& gy, const BElement& b, const FixedPointConfig& cfg,
                  ConvolutionReport* report, const BElement* w0) {
  BElement w;
  if (w0 && in_upper_closure(*w0, kHalfPlaneSlack)) {
    w = *w0;
  } else {
    // start from b lifted one unit into the half-plane: the fixed point is
    // globally attracting and the early iterates stay cheap to evaluate
    w = b;
    for (auto& blk : w.blocks)
      for (int i = 0; i < blk.rows(); ++i) blk(i, i) += cpx(0.0, 1.0);
  }
  const double theta = cfg.damping;
  double res = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= cfg.max_iter; ++it) {
    // early iterations tolerate loose transforms; the tolerance tightens with
    // the residual so the converged point is evaluated at full precision
    const double hint = std::clamp(res * 5e-3, 1e-11, 1e-6);
    gx.set_accuracy(hint);
    gy.set_accuracy(hint);
    BElement f;
    try {
      BElement hx = gx.htrans(w);
      hx += b; // h_x(w) + b
      f = gy.htrans(hx);
      f += b; // f_b(w)
    } catch (const Error& e) {
      if (e.code() != Errc::Singular) throw;
      fail(Errc::Singular,
           std::string(e.what()) + " during subordination; increase the smoothing epsilon or damp the iteration");
    }
    res = max_diff(f, w);

    if (theta != 1.0) {
      BElement wn = w;
      wn *= cpx(1.0 - theta);
      f *= cpx(theta);
      wn += f;
      w = std::move(wn);
    } else {
      w = std::move(f);
    }
    if (!in_upper_closure(w, kHalfPlaneSlack))
      fail(Errc::LeftHalfPlane, "subordination iterate left the upper half-plane");

    if (res < cfg.tol) {
      if (report) {
        report->iterations += it;
        report->residual = res;
        report->subordinator = w;
      }
      gx.set_accuracy(1e-11);
      return gx.cauchy(w);
    }
  }
  fail(Errc::NoConvergence,
       "subordination did not converge in " + std::to_string(cfg.max_iter) +
           " iterations (residual " + std::to_string(res) + ")");
}

BElement FreeAddEval::cauchy(const BElement& b) {
  ConvolutionReport rep;
  FixedPointConfig cfg = cfg_;
  cfg.tol = std::clamp(accuracy_ * 0.1, cfg_.tol, 1e-7);
  BElement g = free_add(x_, y_, b, cfg, &rep, warm_ ? &*warm_ : nullptr);
  warm_ = rep.subordinator;
  iters_ += rep.iterations;
  last_residual_ = rep.residual;
  return g;
}

BElement fold(const std::vector<FreeSummand>& summands, const RectSpace& space, int m,
              const QuadratureRule& rule, const BElement& b, const FixedPointConfig& cfg,
              ConvolutionReport* report) {
  if (summands.empty()) fail(Errc::BadArgument, "fold needs at least one summand");

  std::vector<std::unique_ptr<CauchyEval>> evals;
  evals.reserve(summands.size());
  for (const auto& s : summands) evals.push_back(make_eval(s, space, m, rule));

  if (evals.size() == 1) {
    BElement g = evals.front()->cauchy(b);
    if (report) report->iterations = 0;
    return g;
  }

  // nested chain: acc = ((s1 + s2) + s3) + ...
  std::vector<std::unique_ptr<FreeAddEval>> chain;
  CauchyEval* acc = evals[0].get();
  for (size_t i = 1; i + 1 < evals.size(); ++i) {
    chain.push_back(std::make_unique<FreeAddEval>(*acc, *evals[i], cfg));
    acc = chain.back().get();
  }
  ConvolutionReport rep;
  BElement g = free_add(*acc, *evals.back(), b, cfg, &rep);
  if (report) {
    report->iterations = rep.iterations + acc->iterations_used();
    report->residual = rep.residual;
    report->subordinator = rep.subordinator;
  }
  return g;
}

BElement semicirc_covariance_oracle(const std::vector<FreeSummand>& semiparts,
                                    const FreeSummand* det_part, const RectSpace& space, int m,
                                    const BElement& b, const FixedPointConfig& cfg) {
  for (const auto& s : semiparts)
    if (s.kind != FreeSummand::Kind::Semi) fail(Errc::BadArgument, "oracle needs Semi summands");

  std::unique_ptr<DetEval> det;
  if (det_part) det = std::make_unique<DetEval>(*det_part, space, m);

  auto eta = [&](const BElement& g) {
    BElement e = zero_b(m, space.block_count());
    for (const auto& s : semiparts) {
      CMatrix t = mul(mul(s.semi_coeff, g.blocks[s.block]), s.semi_coeff);
      t *= cpx(s.scale * s.scale);
      e.blocks[s.block] += t;
    }
    return e;
  };

  BElement g = det ? det->cauchy(b) : inverse_b(b);
  const double theta = cfg.damping;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    BElement arg = b;
    arg -= eta(g);
    BElement gn = det ? det->cauchy(arg) : inverse_b(arg);
    const double res = max_diff(gn, g);
    if (theta != 1.0) {
      BElement mix = g;
      mix *= cpx(1.0 - theta);
      gn *= cpx(theta);
      mix += gn;
      g = std::move(mix);
    } else {
      g = std::move(gn);
    }
    if (res < cfg.tol) return g;
  }
  fail(Errc::NoConvergence, "covariance fixed point did not converge");
}

} // namespace fdeq
