// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#ifndef ANGSPOOF_CHANNEL_MODEL_HPP
#define ANGSPOOF_CHANNEL_MODEL_HPP

#include "angspoof/array_geometry.hpp"

#include <armadillo>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace angspoof {

/// Speed of light, m/s.
inline constexpr double kSpeedOfLight = 299792458.0;

/// Path angles plus complex gains. Gains and angles share the path count;
/// at least one gain must be nonzero.
class ChannelParams {
 public:
  ChannelParams(AngleVector angles, arma::cx_vec gains);

  const AngleVector& angles() const noexcept { return angles_; }
  const arma::cx_vec& gains() const noexcept { return gains_; }
  std::size_t num_paths() const noexcept { return angles_.size(); }

 private:
  AngleVector angles_;
  arma::cx_vec gains_;
};

/// BS combiner bank W (N_r x S) and nominal UE precoder bank F (N_t x M).
/// Every entry obeys the analog amplitude cap 1/sqrt(N).
class SoundingCodebook {
 public:
  SoundingCodebook(arma::cx_mat combiners, arma::cx_mat precoders);

  const arma::cx_mat& combiners() const noexcept { return combiners_; }
  const arma::cx_mat& precoders() const noexcept { return precoders_; }

  std::size_t n_r() const noexcept { return combiners_.n_rows; }
  std::size_t n_t() const noexcept { return precoders_.n_rows; }
  std::size_t measurements() const noexcept { return combiners_.n_cols; }
  std::size_t symbols() const noexcept { return precoders_.n_cols; }

 private:
  arma::cx_mat combiners_;
  arma::cx_mat precoders_;
};

/// One N_t x M precoder matrix per measurement s.
class PrecoderSet {
 public:
  explicit PrecoderSet(std::vector<arma::cx_mat> per_measurement);

  /// The nominal bank F reused for every measurement.
  static PrecoderSet replicate(const arma::cx_mat& precoders, std::size_t measurements);

  const std::vector<arma::cx_mat>& per_measurement() const noexcept { return mats_; }
  const arma::cx_mat& operator[](std::size_t s) const { return mats_.at(s); }
  arma::cx_mat& operator[](std::size_t s) { return mats_.at(s); }

  std::size_t measurements() const noexcept { return mats_.size(); }
  std::size_t n_t() const noexcept { return mats_.front().n_rows; }
  std::size_t symbols() const noexcept { return mats_.front().n_cols; }

  /// Largest entry modulus across all measurements.
  double max_modulus() const;

 private:
  std::vector<arma::cx_mat> mats_;
};

/// Received samples y, measurement-major: sample (s, m) sits at s*M + m.
struct ReceivedSignal {
  arma::cx_vec samples;
  std::size_t measurements = 0;
  std::size_t symbols = 0;
  double tx_power = 0.0;     // W
  double noise_power = 0.0;  // W per complex sample

  const cplx& at(std::size_t s, std::size_t m) const { return samples[s * symbols + m]; }
};

/// H = sum_l gain_l * a_BS(aoa_l) a_UE(aod_l)^T, N_r x N_t.
arma::cx_mat channel_matrix(const ChannelParams& params, std::size_t n_r, std::size_t n_t);

/// Observation operator Z (SM x L) for the nominal bank F shared by all
/// measurements. Row s*M + m, column l holds
/// (w_s^H a_BS(aoa_l)) * (a_UE(aod_l)^T f_m).
arma::cx_mat build_observation(const arma::cx_mat& combiners, const arma::cx_mat& precoders,
                               const AngleVector& angles);

/// Same as above with a distinct precoder matrix per measurement (f_{s,m}).
arma::cx_mat build_observation(const arma::cx_mat& combiners, const PrecoderSet& precoders,
                               const AngleVector& angles);

/// sqrt(Pt) * Z * gains + n, n ~ CN(0, noise_power) i.i.d.; deterministic in seed.
ReceivedSignal synthesize_received(const ChannelParams& channel, const SoundingCodebook& codebook,
                                   double tx_power, double noise_power, std::uint64_t seed);

ReceivedSignal synthesize_received(const ChannelParams& channel, const arma::cx_mat& combiners,
                                   const PrecoderSet& precoders, double tx_power,
                                   double noise_power, std::uint64_t seed);

/// Add CN(0, noise_power) samples to a noiseless signal in place.
void add_noise(arma::cx_vec& samples, double noise_power, std::uint64_t seed);

/// Exhaustive-search sounding beams. Combiner s points at sin = -1 + 2s/S,
/// precoder m at sin = -1 + 2m/M; every entry has modulus 1/sqrt(N).
SoundingCodebook default_codebook(std::size_t n_r, std::size_t n_t, std::size_t measurements,
                                  std::size_t symbols);

/// Free-space path gains with uniform random phases.
///
/// |gain_0| = lambda_c / (4 pi d_LoS); NLoS path l has
/// |gain_l| = r * lambda_c / (4 pi (d_UE->SP + d_SP->BS)).
arma::cx_vec gains_from_scene(const SceneGeometry& scene, double carrier_freq,
                              std::uint64_t seed, double reflection_factor = 0.5);

/// Magnitudes only (the deterministic part of gains_from_scene).
arma::vec path_gain_magnitudes(const SceneGeometry& scene, double carrier_freq,
                               double reflection_factor = 0.5);

}  // namespace angspoof

#endif  // ANGSPOOF_CHANNEL_MODEL_HPP
