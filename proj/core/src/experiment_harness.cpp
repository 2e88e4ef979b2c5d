// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/experiment_harness.hpp"

#include "angspoof/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

namespace angspoof {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

// Stream tags for derive_seed.
constexpr std::uint64_t kGainStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

}  // namespace

SceneGeometry reference_scene() {
  return SceneGeometry({0.0, 0.0}, 0.0, {10.0, 5.0}, -2.0 * std::numbers::pi / 3.0,
                       {{7.0, -15.0}});
}

SceneGeometry reference_spoof_scene() {
  return SceneGeometry({0.0, 0.0}, 0.0, {30.0, 20.0}, -std::numbers::pi, {{20.0, -10.0}});
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

ExperimentConfig::ExperimentConfig() : noise_psd(dbm_to_watts(-174.0)) {}

void ExperimentConfig::validate() const {
  if (trials == 0) throw ConfigError("trials must be at least 1");
  if (power_grid_dbm.empty()) throw ConfigError("power grid must not be empty");
  for (double p : power_grid_dbm) {
    if (!std::isfinite(p)) throw ConfigError("power grid entries must be finite");
  }
  if (n_r == 0 || n_t == 0 || measurements == 0 || symbols == 0) {
    throw ConfigError("array and sounding sizes must be positive");
  }
  if (!(carrier_freq > 0.0) || !(bandwidth > 0.0) || !(noise_psd > 0.0)) {
    throw ConfigError("carrier frequency, bandwidth and noise PSD must be positive");
  }
  if (reflection_factor < 0.0) throw ConfigError("reflection factor must be nonnegative");
  if (!(grid_step_deg > 0.0) || grid_step_deg > 90.0) {
    throw ConfigError("grid step must lie in (0, 90] degrees");
  }
  if (mode == Mode::kPrecoderSpoof && !spoof.scene && !spoof.angles) {
    throw ConfigError("precoder_spoof mode needs a spoof scene or explicit target angles");
  }
  const AngleVector* explicit_angles = spoof.angles ? &*spoof.angles : nullptr;
  const std::size_t target_paths =
      explicit_angles ? explicit_angles->size() : (spoof.scene ? spoof.scene->num_paths() : 0);
  if (target_paths != 0 && target_paths != scene.num_paths()) {
    throw ConfigError("target geometry must have as many paths as the true scene");
  }
  if (spoof.p_max < 0.0) throw ConfigError("p_max must be positive (0 selects the default)");
  if (spoof.max_iters == 0 || !(spoof.tol > 0.0)) {
    throw ConfigError("spoof max_iters must be >= 1 and tol > 0");
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t a,
                          std::uint64_t b) {
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffULL); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(base), hi(base), lo(stream), hi(stream), lo(a), hi(a), lo(b), hi(b)};
  std::uint32_t out[2];
  seq.generate(std::begin(out), std::end(out));
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

Scenario prepare_scenario(const ExperimentConfig& config, bool force_spoof) {
  config.validate();
  Scenario sc{default_codebook(config.n_r, config.n_t, config.measurements, config.symbols),
              scene_to_angles(config.scene),
              std::nullopt,
              AngleGrid::uniform(config.grid_step_deg / kDeg),
              std::nullopt,
              std::nullopt};
  if (config.spoof.angles) {
    sc.target_angles = *config.spoof.angles;
  } else if (config.spoof.scene) {
    sc.target_angles = scene_to_angles(*config.spoof.scene);
  }
  const bool spoofing = config.mode == Mode::kPrecoderSpoof || force_spoof;
  if (spoofing) {
    if (!sc.target_angles) throw ConfigError("spoofing needs a target geometry");
    const double p_max = config.spoof.p_max > 0.0
                             ? config.spoof.p_max
                             : static_cast<double>(sc.true_angles.size());
    sc.problem.emplace(sc.codebook, sc.true_angles, *sc.target_angles, p_max);
    SpoofOptions opts;
    opts.max_iters = config.spoof.max_iters;
    opts.tol = config.spoof.tol;
    opts.init_seed = config.spoof.init_seed;
    sc.spoof.emplace(run_spoof_design(*sc.problem, opts));
  }
  return sc;
}

Deviation spoofing_deviation(const AngleVector& estimated, const AngleVector& reference) {
  if (estimated.size() != reference.size()) {
    throw InvalidArgument("estimated and reference angle vectors differ in length");
  }
  const std::size_t L = reference.size();
  std::vector<std::size_t> perm(L);
  std::iota(perm.begin(), perm.end(), 0);
  Deviation best{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double sa = 0.0;
    double sd = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      const double da = wrap_angle(estimated.aoa()[perm[l]] - reference.aoa()[l]);
      const double dd = wrap_angle(estimated.aod()[perm[l]] - reference.aod()[l]);
      sa += da * da;
      sd += dd * dd;
    }
    if (sa + sd < best_cost) {
      best_cost = sa + sd;
      best = {std::sqrt(sa), std::sqrt(sd)};
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double rmse(const std::vector<double>& errors) {
  if (errors.empty()) return 0.0;
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

namespace {

std::vector<double> sorted_powers(const ExperimentConfig& config) {
  std::vector<double> p = config.power_grid_dbm;
  std::sort(p.begin(), p.end());
  return p;
}

arma::cx_vec trial_gains(const ExperimentConfig& config, std::size_t trial) {
  const std::size_t draw = config.variation == GainVariation::kNoiseOnly ? 0 : trial;
  return gains_from_scene(config.scene, config.carrier_freq,
                          derive_seed(config.base_seed, kGainStream, draw),
                          config.reflection_factor);
}

// Pads an under-resolved estimate with copies of its first path so that it
// can be compared against the full reference.
AngleVector pad_to(const AngleVector& est, std::size_t paths) {
  std::vector<double> aoa = est.aoa();
  std::vector<double> aod = est.aod();
  while (aoa.size() < paths) {
    aoa.push_back(est.aoa().front());
    aod.push_back(est.aod().front());
  }
  return AngleVector(aoa, aod);
}

struct TrialOutcome {
  ReceivedSignal signal;
  BeamIndex beam;
  double spectral_efficiency = 0.0;
};

TrialOutcome run_link(const ExperimentConfig& config, const Scenario& sc, bool spoofing,
                      const ChannelParams& channel, double tx_power, std::uint64_t noise_seed) {
  const double noise_power = config.bandwidth * config.noise_psd;
  const auto& cb = sc.codebook;
  TrialOutcome out;
  if (spoofing) {
    out.signal = synthesize_received(channel, cb.combiners(), sc.spoof->state.precoders, tx_power,
                                     noise_power, noise_seed);
  } else {
    out.signal = synthesize_received(channel, cb, tx_power, noise_power, noise_seed);
  }
  out.beam = select_beam(out.signal);
  const arma::cx_vec w = cb.combiners().col(out.beam.s);
  arma::cx_vec f = cb.precoders().col(out.beam.m);
  if (spoofing && config.spoof.comm_precoder == CommPrecoder::kTransmitted) {
    f = communication_precoder(sc.spoof->state, out.beam.s, out.beam.m);
  }
  out.spectral_efficiency = achievable_rate(channel, w, f, tx_power, config.bandwidth,
                                            config.noise_psd, config.snr_convention)
                                .spectral_efficiency;
  return out;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  return run_sweep(config, prepare_scenario(config));
}

SweepResult run_sweep(const ExperimentConfig& config, const Scenario& sc) {
  config.validate();
  const bool spoofing = config.mode == Mode::kPrecoderSpoof;
  if (spoofing && !sc.spoof) throw InvalidArgument("scenario was prepared without a spoof design");
  const AngleVector& reference = spoofing ? *sc.target_angles : sc.true_angles;

  EstimatorOptions est_opts;
  est_opts.paths = sc.true_angles.size();
  est_opts.min_separation = config.min_separation;
  est_opts.search = config.peak_search;
  est_opts.keep_surface = false;

  SweepResult result;
  const auto powers = sorted_powers(config);
  for (std::size_t pi = 0; pi < powers.size(); ++pi) {
    const double tx_power = dbm_to_watts(powers[pi]);
    std::vector<double> eps_aoa;
    std::vector<double> eps_aod;
    double se_sum = 0.0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const ChannelParams channel(sc.true_angles, trial_gains(config, t));
      const std::uint64_t noise_seed = derive_seed(config.base_seed, kNoiseStream, pi, t);
      TrialOutcome link;
      EstimationResult est = [&] {
        try {
          link = run_link(config, sc, spoofing, channel, tx_power, noise_seed);
          return grid_ml_estimate(link.signal, sc.codebook, sc.grid, est_opts);
        } catch (const NumericalFailure& e) {
          throw NumericalFailure(std::string(e.what()) + " at power " +
                                     std::to_string(powers[pi]) + " dBm, trial " +
                                     std::to_string(t),
                                 e.iteration());
        }
      }();
      const Deviation dev = spoofing_deviation(pad_to(est.angles, reference.size()), reference);
      TrialRecord rec;
      rec.power_dbm = powers[pi];
      rec.trial = t;
      rec.eps_aoa_deg = dev.aoa * kDeg;
      rec.eps_aod_deg = dev.aod * kDeg;
      rec.spectral_efficiency = link.spectral_efficiency;
      rec.beam = link.beam;
      rec.under_resolved = est.under_resolved;
      eps_aoa.push_back(rec.eps_aoa_deg);
      eps_aod.push_back(rec.eps_aod_deg);
      se_sum += rec.spectral_efficiency;
      result.trials.push_back(rec);
    }
    result.per_power.push_back({powers[pi], rmse(eps_aoa), rmse(eps_aod),
                                se_sum / static_cast<double>(config.trials), config.trials});
  }
  return result;
}

std::vector<RatePoint> rate_curve(const ExperimentConfig& config) {
  const Scenario sc = prepare_scenario(config, /*force_spoof=*/true);
  std::vector<RatePoint> curve;
  const auto powers = sorted_powers(config);
  for (std::size_t pi = 0; pi < powers.size(); ++pi) {
    const double tx_power = dbm_to_watts(powers[pi]);
    RatePoint point{powers[pi], 0.0, 0.0};
    for (std::size_t t = 0; t < config.trials; ++t) {
      const ChannelParams channel(sc.true_angles, trial_gains(config, t));
      const std::uint64_t noise_seed = derive_seed(config.base_seed, kNoiseStream, pi, t);
      point.no_spoof += run_link(config, sc, false, channel, tx_power, noise_seed).spectral_efficiency;
      point.spoof += run_link(config, sc, true, channel, tx_power, noise_seed).spectral_efficiency;
    }
    point.no_spoof /= static_cast<double>(config.trials);
    point.spoof /= static_cast<double>(config.trials);
    curve.push_back(point);
  }
  return curve;
}

Heatmap generate_heatmap(const ExperimentConfig& config, Mode mode, HeatmapGains gains) {
  const bool spoofing = mode == Mode::kPrecoderSpoof;
  const Scenario sc = prepare_scenario(config, spoofing);
  const ChannelParams channel(sc.true_angles, spoofing && gains == HeatmapGains::kDesign
                                                  ? sc.spoof->state.d
                                                  : trial_gains(config, 0));
  const double tx_power = dbm_to_watts(sorted_powers(config).back());

  ReceivedSignal y =
      spoofing ? synthesize_received(channel, sc.codebook.combiners(), sc.spoof->state.precoders,
                                     tx_power, 0.0, 0)
               : synthesize_received(channel, sc.codebook, tx_power, 0.0, 0);

  EstimatorOptions opts;
  opts.paths = sc.true_angles.size();
  opts.min_separation = config.min_separation;
  opts.search = config.peak_search;
  const EstimationResult est = grid_ml_estimate(y, sc.codebook, sc.grid, opts);

  Heatmap map{sc.grid, est.cost_surface, {}};
  for (std::size_t l = 0; l < sc.true_angles.size(); ++l) {
    map.markers.push_back({"true", l, sc.true_angles.aoa()[l], sc.true_angles.aod()[l]});
  }
  if (sc.target_angles) {
    for (std::size_t l = 0; l < sc.target_angles->size(); ++l) {
      map.markers.push_back(
          {"target", l, sc.target_angles->aoa()[l], sc.target_angles->aod()[l]});
    }
  }
  for (std::size_t l = 0; l < est.angles.size(); ++l) {
    map.markers.push_back({"estimate", l, est.angles.aoa()[l], est.angles.aod()[l]});
  }
  return map;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  const auto precision = out.precision();
  out.precision(10);
  out << "power_dbm,rmse_aoa_deg,rmse_aod_deg,se_bps_hz\n";
  for (const auto& r : result.per_power) {
    out << r.power_dbm << ',' << r.rmse_aoa_deg << ',' << r.rmse_aod_deg << ','
        << r.mean_spectral_efficiency << '\n';
  }
  out.precision(precision);
}

void write_trials_csv(std::ostream& out, const SweepResult& result) {
  const auto precision = out.precision();
  out.precision(10);
  out << "power_dbm,trial,eps_aoa_deg,eps_aod_deg,se_bps_hz,s_hat,m_hat,under_resolved\n";
  for (const auto& r : result.trials) {
    out << r.power_dbm << ',' << r.trial << ',' << r.eps_aoa_deg << ',' << r.eps_aod_deg << ','
        << r.spectral_efficiency << ',' << r.beam.s << ',' << r.beam.m << ','
        << (r.under_resolved ? 1 : 0) << '\n';
  }
  out.precision(precision);
}

void write_rate_csv(std::ostream& out, const std::vector<RatePoint>& curve) {
  const auto precision = out.precision();
  out.precision(10);
  out << "power_dbm,se_no_spoof_bps_hz,se_spoof_bps_hz\n";
  for (const auto& p : curve) out << p.power_dbm << ',' << p.no_spoof << ',' << p.spoof << '\n';
  out.precision(precision);
}

void write_heatmap_markers_csv(std::ostream& out, const Heatmap& heatmap) {
  const auto precision = out.precision();
  out.precision(10);
  out << "kind,path,aoa_deg,aod_deg\n";
  for (const auto& m : heatmap.markers) {
    out << m.kind << ',' << m.path << ',' << m.aoa * kDeg << ',' << m.aod * kDeg << '\n';
  }
  out.precision(precision);
}

}  // namespace angspoof
