// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/channel_model.hpp"

#include "angspoof/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace angspoof {

namespace {

constexpr double kCapSlack = 1e-12;

void check_amplitude_cap(const arma::cx_mat& m, const char* what) {
  const double cap = 1.0 / std::sqrt(static_cast<double>(m.n_rows));
  if (m.n_elem > 0 && arma::abs(m).max() > cap + kCapSlack) {
    throw InvalidArgument(std::string(what) + " violates the analog amplitude cap 1/sqrt(N)");
  }
}

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

ChannelParams::ChannelParams(AngleVector angles, arma::cx_vec gains)
    : angles_(std::move(angles)), gains_(std::move(gains)) {
  if (gains_.n_elem != angles_.size()) {
    throw InvalidArgument("gain vector length differs from path count");
  }
  if (arma::abs(gains_).max() == 0.0) {
    throw InvalidArgument("channel needs at least one nonzero path gain");
  }
}

SoundingCodebook::SoundingCodebook(arma::cx_mat combiners, arma::cx_mat precoders)
    : combiners_(std::move(combiners)), precoders_(std::move(precoders)) {
  if (combiners_.n_rows == 0 || combiners_.n_cols == 0) {
    throw InvalidArgument("combiner bank must be nonempty");
  }
  if (precoders_.n_rows == 0 || precoders_.n_cols == 0) {
    throw InvalidArgument("precoder bank must be nonempty");
  }
  check_amplitude_cap(combiners_, "combiner bank");
  check_amplitude_cap(precoders_, "precoder bank");
}

PrecoderSet::PrecoderSet(std::vector<arma::cx_mat> per_measurement)
    : mats_(std::move(per_measurement)) {
  if (mats_.empty()) throw InvalidArgument("precoder set needs at least one measurement");
  const auto rows = mats_.front().n_rows;
  const auto cols = mats_.front().n_cols;
  if (rows == 0 || cols == 0) throw InvalidArgument("precoder matrices must be nonempty");
  for (const auto& m : mats_) {
    if (m.n_rows != rows || m.n_cols != cols) {
      throw InvalidArgument("precoder matrices differ in shape");
    }
  }
  const double cap = 1.0 / std::sqrt(static_cast<double>(rows));
  if (max_modulus() > cap + 1e-9) {
    throw InvalidArgument("precoder set violates the analog amplitude cap 1/sqrt(N_t)");
  }
}

PrecoderSet PrecoderSet::replicate(const arma::cx_mat& precoders, std::size_t measurements) {
  return PrecoderSet(std::vector<arma::cx_mat>(measurements, precoders));
}

double PrecoderSet::max_modulus() const {
  double m = 0.0;
  for (const auto& f : mats_) m = std::max(m, arma::abs(f).max());
  return m;
}

arma::cx_mat channel_matrix(const ChannelParams& params, std::size_t n_r, std::size_t n_t) {
  const arma::cx_mat a_bs = steering_matrix(n_r, params.angles().aoa());
  const arma::cx_mat a_ue = steering_matrix(n_t, params.angles().aod());
  return a_bs * arma::diagmat(params.gains()) * a_ue.st();
}

arma::cx_mat build_observation(const arma::cx_mat& combiners, const arma::cx_mat& precoders,
                               const AngleVector& angles) {
  return build_observation(combiners, PrecoderSet::replicate(precoders, combiners.n_cols),
                           angles);
}

arma::cx_mat build_observation(const arma::cx_mat& combiners, const PrecoderSet& precoders,
                               const AngleVector& angles) {
  const std::size_t S = combiners.n_cols;
  if (precoders.measurements() != S) {
    throw InvalidArgument("precoder set and combiner bank disagree on the measurement count");
  }
  const std::size_t M = precoders.symbols();
  const std::size_t L = angles.size();

  const arma::cx_mat a_bs = steering_matrix(combiners.n_rows, angles.aoa());
  const arma::cx_mat a_ue = steering_matrix(precoders.n_t(), angles.aod());
  const arma::cx_mat bs_resp = combiners.t() * a_bs;  // S x L, w_s^H a_BS(aoa_l)

  arma::cx_mat z(S * M, L);
  for (std::size_t s = 0; s < S; ++s) {
    const arma::cx_mat ue_resp = precoders[s].st() * a_ue;  // M x L, a_UE(aod_l)^T f_{s,m}
    for (std::size_t l = 0; l < L; ++l) {
      z.submat(s * M, l, s * M + M - 1, l) = bs_resp(s, l) * ue_resp.col(l);
    }
  }
  return z;
}

void add_noise(arma::cx_vec& samples, double noise_power, std::uint64_t seed) {
  if (noise_power < 0.0) throw InvalidArgument("noise power must be nonnegative");
  if (noise_power == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(noise_power / 2.0));
  for (auto& v : samples) {
    const double re = normal(rng);
    const double im = normal(rng);
    v += cplx(re, im);
  }
}

ReceivedSignal synthesize_received(const ChannelParams& channel, const arma::cx_mat& combiners,
                                   const PrecoderSet& precoders, double tx_power,
                                   double noise_power, std::uint64_t seed) {
  if (tx_power < 0.0) throw InvalidArgument("transmit power must be nonnegative");
  const arma::cx_mat z = build_observation(combiners, precoders, channel.angles());
  ReceivedSignal out;
  out.samples = std::sqrt(tx_power) * (z * channel.gains());
  out.measurements = combiners.n_cols;
  out.symbols = precoders.symbols();
  out.tx_power = tx_power;
  out.noise_power = noise_power;
  add_noise(out.samples, noise_power, seed);
  return out;
}

ReceivedSignal synthesize_received(const ChannelParams& channel, const SoundingCodebook& codebook,
                                   double tx_power, double noise_power, std::uint64_t seed) {
  return synthesize_received(
      channel, codebook.combiners(),
      PrecoderSet::replicate(codebook.precoders(), codebook.measurements()), tx_power,
      noise_power, seed);
}

namespace {

arma::cx_mat beam_bank(std::size_t n_antennas, std::size_t beams) {
  arma::cx_mat bank(n_antennas, beams);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
  for (std::size_t k = 0; k < beams; ++k) {
    const double sine = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(beams);
    bank.col(k) = scale * steering_from_sine(n_antennas, sine);
  }
  return bank;
}

}  // namespace

SoundingCodebook default_codebook(std::size_t n_r, std::size_t n_t, std::size_t measurements,
                                  std::size_t symbols) {
  if (n_r == 0 || n_t == 0 || measurements == 0 || symbols == 0) {
    throw InvalidArgument("codebook dimensions must be positive");
  }
  return SoundingCodebook(beam_bank(n_r, measurements), beam_bank(n_t, symbols));
}

arma::vec path_gain_magnitudes(const SceneGeometry& scene, double carrier_freq,
                               double reflection_factor) {
  if (!(carrier_freq > 0.0)) throw InvalidArgument("carrier frequency must be positive");
  if (reflection_factor < 0.0) throw InvalidArgument("reflection factor must be nonnegative");
  const double wavelength = kSpeedOfLight / carrier_freq;
  const double k = wavelength / (4.0 * std::numbers::pi);

  arma::vec mag(scene.num_paths());
  mag[0] = k / distance(scene.ue_position(), scene.bs_position());
  for (std::size_t l = 0; l < scene.scatterers().size(); ++l) {
    const Point2& sp = scene.scatterers()[l];
    const double d = distance(scene.ue_position(), sp) + distance(sp, scene.bs_position());
    mag[l + 1] = reflection_factor * k / d;
  }
  return mag;
}

arma::cx_vec gains_from_scene(const SceneGeometry& scene, double carrier_freq,
                              std::uint64_t seed, double reflection_factor) {
  const arma::vec mag = path_gain_magnitudes(scene, carrier_freq, reflection_factor);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  arma::cx_vec g(mag.n_elem);
  for (std::size_t l = 0; l < mag.n_elem; ++l) g[l] = std::polar(mag[l], phase(rng));
  return g;
}

}  // namespace angspoof
