#pragma once

#include "fdeq/model.hpp"
#include "fdeq/rng.hpp"
#include "fdeq/spectra.hpp"

namespace fdeq {

struct EmpiricalSpectrum {
  std::vector<double> eigenvalues; // pooled, sorted ascending
  int m = 1;
  int reps = 1;
  std::uint64_t seed = 0;
};

/// Complex Ginibre with entry variance `entry_var`.
CMatrix sample_ginibre(int rows, int cols, double entry_var, Rng& rng);
/// Hermitian Wigner (G + G*)/sqrt(2) with G Ginibre of entry variance 1/n.
CMatrix sample_wigner(int n, Rng& rng);
/// Haar unitary: QR of a Ginibre with the R-diagonal phases divided out.
CMatrix sample_haar_unitary(int n, Rng& rng);

/// One realization of the blown-up ensemble: deterministic symbols become
/// A (x) I_m, random symbols are sampled on their blown-up blocks, the
/// polynomial is evaluated and the target-block corner returned (Hermitian).
CMatrix sample_ensemble(const ModelSpec& spec, int m, Rng& rng);
CMatrix sample_ensemble(const ModelSpec& spec, int m, std::uint64_t seed);

/// `reps` independent realizations with per-realization streams derived from
/// (seed, index); pooled sorted eigenvalues of the target corners.
EmpiricalSpectrum empirical_spectrum(const ModelSpec& spec, int m, int reps, std::uint64_t seed);

/// Sup distance between the empirical CDF and the curve's trapezoidal CDF
/// (curve renormalized internally; pre: curve mass >= 0.9).
double ks_distance(const EmpiricalSpectrum& emp, const DensityCurve& curve);

struct HistogramBin {
  double center;
  long count;
};
std::vector<HistogramBin> histogram(const EmpiricalSpectrum& emp, int bins);

/// Cheap spectral-range guess for the default grid: one realization at m = 2,
/// padded by one unit on each side.
GridSpec pilot_grid(const ModelSpec& spec, std::uint64_t seed, int points);

} // namespace fdeq
