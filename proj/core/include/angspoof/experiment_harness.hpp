// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#ifndef ANGSPOOF_EXPERIMENT_HARNESS_HPP
#define ANGSPOOF_EXPERIMENT_HARNESS_HPP

#include "angspoof/array_geometry.hpp"
#include "angspoof/bs_estimator.hpp"
#include "angspoof/channel_model.hpp"
#include "angspoof/spoof_optimizer.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace angspoof {

enum class Mode { kNoSpoof, kPrecoderSpoof };

/// What changes between Monte Carlo trials besides the noise draw.
enum class GainVariation { kNoiseAndPhase, kNoiseOnly };

/// Which precoder the spoofing UE uses once the BS has picked (s_hat, m_hat).
enum class CommPrecoder { kTransmitted, kNominal };

/// BS at the origin, UE at (10, 5) facing -2pi/3, one scatterer at (7, -15).
SceneGeometry reference_scene();

/// Virtual UE at (30, 20) facing -pi, virtual scatterer at (20, -10).
SceneGeometry reference_spoof_scene();

struct SpoofSettings {
  /// Target geometry, either from a virtual scene or explicit angles.
  std::optional<SceneGeometry> scene = reference_spoof_scene();
  std::optional<AngleVector> angles;
  /// 0 selects the default budget L.
  double p_max = 0.0;
  std::size_t max_iters = 200;
  double tol = 1e-8;
  std::uint64_t init_seed = 0;
  CommPrecoder comm_precoder = CommPrecoder::kTransmitted;
};

struct ExperimentConfig {
  Mode mode = Mode::kPrecoderSpoof;
  SceneGeometry scene = reference_scene();
  SpoofSettings spoof;

  std::size_t n_r = 15;
  std::size_t n_t = 5;
  std::size_t measurements = 15;  // S
  std::size_t symbols = 15;       // M

  double carrier_freq = 27.8e9;     // Hz
  double bandwidth = 396e6;         // Hz
  double noise_psd = 0.0;           // W/Hz, set from -174 dBm/Hz by default
  double reflection_factor = 0.5;
  SnrConvention snr_convention = SnrConvention::kBandwidthNoise;

  std::vector<double> power_grid_dbm{-10, -5, 0, 5, 10, 15, 20};
  std::size_t trials = 250;
  std::uint64_t base_seed = 1;
  GainVariation variation = GainVariation::kNoiseAndPhase;

  double grid_step_deg = 0.5;
  std::size_t min_separation = 3;
  PeakSearch peak_search = PeakSearch::kSuccessive;

  ExperimentConfig();

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Everything derived once per configuration: codebook, angle sets, search
/// grid and, in spoofing mode, the converged spoof design.
struct Scenario {
  SoundingCodebook codebook;
  AngleVector true_angles;
  std::optional<AngleVector> target_angles;
  AngleGrid grid;
  std::optional<SpoofProblem> problem;
  std::optional<SpoofRun> spoof;
};

/// Builds the codebook and angle sets, and runs the spoof design when the
/// mode (or `force_spoof`) asks for it.
Scenario prepare_scenario(const ExperimentConfig& config, bool force_spoof = false);

/// Spoofing deviation after the best joint assignment of estimated paths to
/// reference paths.
struct Deviation {
  double aoa = 0.0;  // rad
  double aod = 0.0;  // rad
};

/// ||theta_hat - theta_ref||, ||phi_hat - phi_ref|| on wrapped differences,
/// minimised jointly over all path permutations.
Deviation spoofing_deviation(const AngleVector& estimated, const AngleVector& reference);

struct TrialRecord {
  double power_dbm = 0.0;
  std::size_t trial = 0;
  double eps_aoa_deg = 0.0;
  double eps_aod_deg = 0.0;
  double spectral_efficiency = 0.0;  // bit/s/Hz
  BeamIndex beam;
  bool under_resolved = false;
};

struct PowerRecord {
  double power_dbm = 0.0;
  double rmse_aoa_deg = 0.0;
  double rmse_aod_deg = 0.0;
  double mean_spectral_efficiency = 0.0;
  std::size_t trials_used = 0;
};

struct SweepResult {
  std::vector<PowerRecord> per_power;  // ascending power
  std::vector<TrialRecord> trials;     // power-major, trial-minor
};

/// RMSE over the given trial deviations (degrees in, degrees out).
double rmse(const std::vector<double>& errors);

/// Monte Carlo power sweep. Each trial's gains derive from (base_seed,
/// trial) and its noise from (base_seed, power index, trial), so results do
/// not depend on evaluation order.
SweepResult run_sweep(const ExperimentConfig& config);

/// Same, reusing an already-prepared scenario.
SweepResult run_sweep(const ExperimentConfig& config, const Scenario& scenario);

struct RatePoint {
  double power_dbm = 0.0;
  double no_spoof = 0.0;  // mean bit/s/Hz
  double spoof = 0.0;     // mean bit/s/Hz
};

/// Mean spectral efficiency with and without the spoofing precoders, per
/// power level. Beam selection uses the noisy sounding observation.
std::vector<RatePoint> rate_curve(const ExperimentConfig& config);

struct HeatmapMarker {
  std::string kind;  // "true", "target" or "estimate"
  std::size_t path = 0;
  double aoa = 0.0;  // rad
  double aod = 0.0;  // rad
};

struct Heatmap {
  AngleGrid grid;
  arma::mat cost;  // single-path projected cost, |AoA| x |AoD|
  std::vector<HeatmapMarker> markers;
};

/// Gains used to synthesize the heatmap signal in spoofing mode: the
/// scene's free-space gains, or the designed surrogate d.
enum class HeatmapGains { kScene, kDesign };

/// Noiseless single-path cost surface under the given mode, at the highest
/// configured power.
Heatmap generate_heatmap(const ExperimentConfig& config, Mode mode,
                         HeatmapGains gains = HeatmapGains::kScene);

/// Seed derivation shared by the harness; stable across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t a,
                          std::uint64_t b = 0);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_trials_csv(std::ostream& out, const SweepResult& result);
void write_rate_csv(std::ostream& out, const std::vector<RatePoint>& curve);
void write_heatmap_markers_csv(std::ostream& out, const Heatmap& heatmap);

}  // namespace angspoof

#endif  // ANGSPOOF_EXPERIMENT_HARNESS_HPP
