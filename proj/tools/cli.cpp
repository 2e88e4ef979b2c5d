// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "cli.hpp"

#include "angspoof/errors.hpp"
#include "angspoof/experiment_config.hpp"
#include "angspoof/experiment_harness.hpp"
#include "angspoof/text_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace angspoof::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kDeg = 180.0 / std::numbers::pi;

struct Invocation {
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> overrides;
  std::optional<double> power_dbm;
  std::optional<std::uint64_t> seed;
  bool noiseless = false;
  std::string heatmap_mode;
  std::string heatmap_gains = "scene";
};

void add_common(CLI::App* sub, Invocation& inv) {
  sub->add_option("-c,--config", inv.config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("-O,--output-dir", inv.output_dir, "Output directory")
      ->envname(kOutputDirEnv)
      ->default_val(".");
  sub->add_option("-o,--override", inv.overrides, "key=value applied after the config file")
      ->allow_extra_args(false);
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::ofstream out(dir / name);
  if (!out) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  return out;
}

fs::path prepare_output(const Invocation& inv, const ExperimentConfig& config) {
  const fs::path dir(inv.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
  open_output(dir, "effective_config.yaml") << render_config(config);
  return dir;
}

void run_estimate(const Invocation& inv, std::ostream& out) {
  const ExperimentConfig config = load_config(inv.config_path, inv.overrides);
  const fs::path dir = prepare_output(inv, config);
  const Scenario sc = prepare_scenario(config);

  const double power_dbm = inv.power_dbm.value_or(
      *std::max_element(config.power_grid_dbm.begin(), config.power_grid_dbm.end()));
  const double tx_power = dbm_to_watts(power_dbm);
  const double noise_power = inv.noiseless ? 0.0 : config.bandwidth * config.noise_psd;
  const std::uint64_t seed = inv.seed.value_or(config.base_seed);

  const ChannelParams channel(
      sc.true_angles,
      gains_from_scene(config.scene, config.carrier_freq, config.base_seed,
                       config.reflection_factor));
  const ReceivedSignal y =
      sc.spoof ? synthesize_received(channel, sc.codebook.combiners(), sc.spoof->state.precoders,
                                     tx_power, noise_power, seed)
               : synthesize_received(channel, sc.codebook, tx_power, noise_power, seed);

  EstimatorOptions opts;
  opts.paths = sc.true_angles.size();
  opts.min_separation = config.min_separation;
  opts.search = config.peak_search;
  opts.keep_surface = false;
  const EstimationResult est = grid_ml_estimate(y, sc.codebook, sc.grid, opts);

  auto file = open_output(dir, "estimate.csv");
  for (std::ostream* s : {&out, static_cast<std::ostream*>(&file)}) {
    s->precision(10);
    *s << "path,aoa_rad,aod_rad,aoa_deg,aod_deg,gain_modulus\n";
    for (std::size_t l = 0; l < est.angles.size(); ++l) {
      *s << l << ',' << est.angles.aoa()[l] << ',' << est.angles.aod()[l] << ','
         << est.angles.aoa()[l] * kDeg << ',' << est.angles.aod()[l] * kDeg << ','
         << std::abs(est.gains(l)) << '\n';
    }
    *s << "residual_cost," << est.residual_cost << '\n';
    if (est.under_resolved) *s << "under_resolved,1\n";
  }
}

void run_spoof(const Invocation& inv, std::ostream& out) {
  const ExperimentConfig config = load_config(inv.config_path, inv.overrides);
  const fs::path dir = prepare_output(inv, config);
  const Scenario sc = prepare_scenario(config, /*force_spoof=*/true);
  const SpoofRun& run = *sc.spoof;

  auto diag = open_output(dir, "spoof_diagnostics.csv");
  write_diagnostics_csv(diag, run.state, run.diagnostics);
  auto prec = open_output(dir, "precoders.txt");
  write_precoders(prec, run.state.precoders);

  out.precision(10);
  out << "iterations," << run.state.iterations << '\n'
      << "final_objective," << run.diagnostics.final_objective << '\n'
      << "subspace_residual," << run.diagnostics.subspace_residual << '\n'
      << "converged," << (run.diagnostics.converged ? 1 : 0) << '\n';
  for (const auto& w : run.diagnostics.warnings) out << "warning," << w << '\n';
}

void run_sweep_cmd(const Invocation& inv, std::ostream& out) {
  const ExperimentConfig config = load_config(inv.config_path, inv.overrides);
  const fs::path dir = prepare_output(inv, config);
  const SweepResult result = run_sweep(config);
  auto sweep = open_output(dir, "sweep.csv");
  write_sweep_csv(sweep, result);
  auto trials = open_output(dir, "trials.csv");
  write_trials_csv(trials, result);
  write_sweep_csv(out, result);
}

void run_heatmap(const Invocation& inv, std::ostream& out) {
  const ExperimentConfig config = load_config(inv.config_path, inv.overrides);
  const fs::path dir = prepare_output(inv, config);
  Mode mode = config.mode;
  if (inv.heatmap_mode == "no_spoof") mode = Mode::kNoSpoof;
  if (inv.heatmap_mode == "precoder_spoof") mode = Mode::kPrecoderSpoof;
  const Heatmap map = generate_heatmap(
      config, mode, inv.heatmap_gains == "design" ? HeatmapGains::kDesign : HeatmapGains::kScene);
  auto grid = open_output(dir, "heatmap.csv");
  write_cost_surface_csv(grid, map.grid, map.cost);
  auto markers = open_output(dir, "heatmap_markers.csv");
  write_heatmap_markers_csv(markers, map);
  write_heatmap_markers_csv(out, map);
}

void run_rate(const Invocation& inv, std::ostream& out) {
  const ExperimentConfig config = load_config(inv.config_path, inv.overrides);
  const fs::path dir = prepare_output(inv, config);
  const auto curve = rate_curve(config);
  auto file = open_output(dir, "rate.csv");
  write_rate_csv(file, curve);
  write_rate_csv(out, curve);
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blind angular spoofing simulator", "angspoof"};
  app.require_subcommand(1);
  Invocation inv;

  auto* estimate = app.add_subcommand("estimate", "One grid-ML estimation on the configured scene");
  add_common(estimate, inv);
  estimate->add_option("--power-dbm", inv.power_dbm, "Transmit power (default: highest grid power)");
  estimate->add_option("--seed", inv.seed, "Noise seed (default: sweep.base_seed)");
  estimate->add_flag("--noiseless", inv.noiseless, "Disable receiver noise");

  auto* spoof = app.add_subcommand("spoof", "Design spoofing precoders");
  add_common(spoof, inv);

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo RMSE sweep over the power grid");
  add_common(sweep, inv);

  auto* heatmap = app.add_subcommand("heatmap", "Export the single-path cost surface");
  add_common(heatmap, inv);
  heatmap->add_option("--mode", inv.heatmap_mode, "no_spoof or precoder_spoof (default: config)")
      ->check(CLI::IsMember({"no_spoof", "precoder_spoof"}));
  heatmap->add_option("--gains", inv.heatmap_gains, "scene or design (spoofing mode only)")
      ->check(CLI::IsMember({"scene", "design"}));

  auto* rate = app.add_subcommand("rate", "Spectral efficiency with and without spoofing");
  add_common(rate, inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    err << app.help();
    return kExitConfig;
  }

  try {
    if (estimate->parsed()) run_estimate(inv, out);
    if (spoof->parsed()) run_spoof(inv, out);
    if (sweep->parsed()) run_sweep_cmd(inv, out);
    if (heatmap->parsed()) run_heatmap(inv, out);
    if (rate->parsed()) run_rate(inv, out);
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DegenerateGeometry& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace angspoof::cli
