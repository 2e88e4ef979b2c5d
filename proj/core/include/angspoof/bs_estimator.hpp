// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#ifndef ANGSPOOF_BS_ESTIMATOR_HPP
#define ANGSPOOF_BS_ESTIMATOR_HPP

#include "angspoof/array_geometry.hpp"
#include "angspoof/channel_model.hpp"

#include <armadillo>

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace angspoof {

/// Uniform AoA x AoD search grid over [-pi/2, pi/2] on both axes.
struct AngleGrid {
  std::vector<double> aoa_points;
  std::vector<double> aod_points;
  double step = 0.0;

  /// Grid with spacing as close to `step` as divides pi evenly; endpoints
  /// -pi/2 and pi/2 are always included.
  static AngleGrid uniform(double step);

  std::size_t size() const noexcept { return aoa_points.size() * aod_points.size(); }
};

/// How the L path peaks are extracted from the likelihood.
enum class PeakSearch {
  /// Path l is the minimum of the projected cost with the l-1 earlier paths
  /// already in Z, followed by cyclic re-estimation of each path given the
  /// others. Robust to weak paths sitting below strong-path sidelobes.
  kSuccessive,
  /// The L deepest local minima of the single-path surface, separated by
  /// non-maximum suppression.
  kSingleSurface,
};

struct EstimatorOptions {
  std::size_t paths = 1;
  /// Suppression radius around accepted peaks, in grid cells (Chebyshev).
  std::size_t min_separation = 3;
  PeakSearch search = PeakSearch::kSuccessive;
  /// Cyclic re-estimation sweeps after the successive pass.
  std::size_t relax_passes = 2;
  /// Sub-grid parabolic refinement sweeps.
  std::size_t refine_passes = 2;
  bool keep_surface = true;
};

struct EstimationResult {
  AngleVector angles;
  arma::cx_vec gains;
  /// Projected cost with all returned paths in Z.
  double residual_cost = 0.0;
  /// Single-path projected cost, rows = AoA points, cols = AoD points.
  arma::mat cost_surface;
  /// Fewer than the requested number of admissible peaks were found.
  bool under_resolved = false;
};

/// ||(I - Z Z^+) y||^2 with a rank-revealing pseudoinverse.
double projected_cost(const arma::cx_vec& y, const arma::cx_mat& z);

/// Least-squares gains (1/sqrt(Pt)) Z^+ y.
arma::cx_vec estimate_gains(const arma::cx_vec& y, const arma::cx_mat& z, double tx_power);

/// Moore-Penrose pseudoinverse with tolerance max(rows, cols) * eps * sigma_max.
arma::cx_mat pseudo_inverse(const arma::cx_mat& z);

/// Grid maximum-likelihood estimate of L path angles from a nominal
/// (fixed-F) observation.
EstimationResult grid_ml_estimate(const ReceivedSignal& y, const SoundingCodebook& codebook,
                                  const AngleGrid& grid, const EstimatorOptions& options);

/// Single-path projected cost on every grid point, |AoA| x |AoD|.
arma::mat single_path_cost_surface(const ReceivedSignal& y, const SoundingCodebook& codebook,
                                   const AngleGrid& grid);

/// Zero-based beam indices.
struct BeamIndex {
  std::size_t s = 0;
  std::size_t m = 0;

  friend bool operator==(const BeamIndex&, const BeamIndex&) = default;
};

/// Lexicographically-first (s, m) maximising |y_{s,m}|^2.
BeamIndex select_beam(const ReceivedSignal& y);

enum class SnrConvention {
  /// SNR = gamma * Pt / (B * N0), consistent with the CN(0, B N0) noise model.
  kBandwidthNoise,
  /// SNR = gamma * Pt / N0, dimensionally loose form kept for comparison.
  kSpectralDensity,
};

struct RateResult {
  double snr_gain = 0.0;             // gamma
  double rate = 0.0;                 // bit/s
  double spectral_efficiency = 0.0;  // bit/s/Hz
};

/// Rate of the beamformed link, gamma = |w^H H f|^2, R = B log2(1 + gamma Pt / sigma^2).
RateResult achievable_rate(const ChannelParams& channel, const arma::cx_vec& w_comm,
                           const arma::cx_vec& f_comm, double tx_power, double bandwidth,
                           double noise_psd,
                           SnrConvention convention = SnrConvention::kBandwidthNoise);

/// CSV `aoa_deg,aod_deg,normalized_likelihood`, row-major (AoA outer). The
/// likelihood is -C rescaled to [0, 1] so peaks are maxima.
void write_cost_surface_csv(std::ostream& out, const AngleGrid& grid, const arma::mat& cost);

/// -C rescaled to [0, 1]; a flat surface maps to all zeros.
arma::mat normalized_likelihood(const arma::mat& cost);

}  // namespace angspoof

#endif  // ANGSPOOF_BS_ESTIMATOR_HPP
