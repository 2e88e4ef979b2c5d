// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/errors.hpp"
#include "angspoof/experiment_config.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace angspoof {
namespace {

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
  const ExperimentConfig c = parse_config("");
  const ExperimentConfig d;
  EXPECT_EQ(c.trials, d.trials);
  EXPECT_EQ(c.power_grid_dbm, d.power_grid_dbm);
  EXPECT_EQ(c.n_r, 15u);
  EXPECT_TRUE(c.spoof.scene.has_value());
}

TEST(ParseConfig, ReadsEverySection) {
  const ExperimentConfig c = parse_config(R"(
mode: no_spoof
scene:
  bs: {position: [1, 2], orientation: 0.1}
  ue: {position: [11, 7], orientation: -2.0}
  scatterers: [[8, -13], [-5, 9]]
spoof:
  target_aoa: [0.1, 0.2, 0.3]
  target_aod: [-0.1, -0.2, -0.3]
  p_max: 4
  max_iters: 50
  tol: 1.0e-6
  init_seed: 3
  comm_precoder: nominal
arrays: {n_r: 12, n_t: 4}
sounding: {measurements: 10, symbols: 9}
link:
  carrier_freq_hz: 28.0e9
  bandwidth_hz: 100.0e6
  noise_psd_dbm_hz: -170
  reflection_factor: 0.3
  snr_convention: spectral_density
sweep:
  power_dbm: [0, 10]
  trials: 7
  base_seed: 99
  gain_variation: noise_only
estimator:
  grid_step_deg: 1.0
  min_separation: 2
  peak_search: single_surface
)");
  EXPECT_EQ(c.mode, Mode::kNoSpoof);
  EXPECT_EQ(c.scene.bs_position(), (Point2{1, 2}));
  EXPECT_DOUBLE_EQ(c.scene.bs_orientation(), 0.1);
  EXPECT_EQ(c.scene.scatterers().size(), 2u);
  ASSERT_TRUE(c.spoof.angles.has_value());
  EXPECT_FALSE(c.spoof.scene.has_value());
  EXPECT_EQ(c.spoof.angles->size(), 3u);
  EXPECT_EQ(c.spoof.p_max, 4.0);
  EXPECT_EQ(c.spoof.max_iters, 50u);
  EXPECT_EQ(c.spoof.tol, 1e-6);
  EXPECT_EQ(c.spoof.init_seed, 3u);
  EXPECT_EQ(c.spoof.comm_precoder, CommPrecoder::kNominal);
  EXPECT_EQ(c.n_r, 12u);
  EXPECT_EQ(c.n_t, 4u);
  EXPECT_EQ(c.measurements, 10u);
  EXPECT_EQ(c.symbols, 9u);
  EXPECT_EQ(c.carrier_freq, 28.0e9);
  EXPECT_EQ(c.bandwidth, 100.0e6);
  EXPECT_NEAR(c.noise_psd, std::pow(10.0, -20.0), 1e-32);
  EXPECT_EQ(c.reflection_factor, 0.3);
  EXPECT_EQ(c.snr_convention, SnrConvention::kSpectralDensity);
  EXPECT_EQ(c.power_grid_dbm, (std::vector<double>{0, 10}));
  EXPECT_EQ(c.trials, 7u);
  EXPECT_EQ(c.base_seed, 99u);
  EXPECT_EQ(c.variation, GainVariation::kNoiseOnly);
  EXPECT_EQ(c.grid_step_deg, 1.0);
  EXPECT_EQ(c.min_separation, 2u);
  EXPECT_EQ(c.peak_search, PeakSearch::kSingleSurface);
}

TEST(ParseConfig, PartialSceneKeepsReferenceValues) {
  const ExperimentConfig c = parse_config("scene:\n  ue:\n    position: [12, 6]\n");
  EXPECT_EQ(c.scene.ue_position(), (Point2{12, 6}));
  EXPECT_NEAR(c.scene.ue_orientation(), -2 * std::numbers::pi / 3, 1e-15);
  EXPECT_EQ(c.scene.scatterers().size(), 1u);
}

TEST(ParseConfig, Errors) {
  EXPECT_THROW(parse_config("bogus: 1"), ConfigError);
  EXPECT_THROW(parse_config("sweep: {trails: 5}"), ConfigError);
  EXPECT_THROW(parse_config("mode: pilot_spoof"), ConfigError);
  EXPECT_THROW(parse_config("sweep: {trials: 0}"), ConfigError);
  EXPECT_THROW(parse_config("sweep: {trials: -1}"), ConfigError);
  EXPECT_THROW(parse_config("sweep: {trials: many}"), ConfigError);
  EXPECT_THROW(parse_config("sweep: {power_dbm: []}"), ConfigError);
  EXPECT_THROW(parse_config("scene: {ue: {position: [1, 2, 3]}}"), ConfigError);
  EXPECT_THROW(parse_config("scene: {ue: {position: [1]}}"), ConfigError);
  EXPECT_THROW(parse_config("scene: {ue: {position: [0, 0]}}"), ConfigError);
  EXPECT_THROW(parse_config("spoof: {target_aoa: [0.1]}"), ConfigError);
  EXPECT_THROW(parse_config("spoof: {target_aoa: [0.1], target_aod: [0.1, 0.2]}"), ConfigError);
  EXPECT_THROW(parse_config("arrays: [1, 2]"), ConfigError);
  EXPECT_THROW(parse_config("mode: [unclosed"), ConfigError);
}

TEST(ParseConfig, ThreeDimensionalPositionMessage) {
  try {
    parse_config("scene: {scatterers: [[1, 2, 3]]}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("3-D"), std::string::npos);
  }
}

TEST(Overrides, FullPathAndSuffix) {
  const ExperimentConfig c = parse_config("sweep: {trials: 250}", {"trials=5", "arrays.n_t=3",
                                                                   "power_dbm=[1, 2]", "mode=no_spoof"});
  EXPECT_EQ(c.trials, 5u);
  EXPECT_EQ(c.n_t, 3u);
  EXPECT_EQ(c.power_grid_dbm, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.mode, Mode::kNoSpoof);
  EXPECT_EQ(parse_config("", {"power_dbm=7"}).power_grid_dbm, (std::vector<double>{7}));
  EXPECT_EQ(parse_config("", {"scene.ue.position=[3, 4]"}).scene.ue_position(), (Point2{3, 4}));
}

TEST(Overrides, AppliedAfterFile) {
  const ExperimentConfig c = parse_config("sweep: {trials: 9}", {"sweep.trials=2"});
  EXPECT_EQ(c.trials, 2u);
}

TEST(Overrides, Errors) {
  EXPECT_THROW(parse_config("", {"trials"}), ConfigError);
  EXPECT_THROW(parse_config("", {"=5"}), ConfigError);
  EXPECT_THROW(parse_config("", {"nonsense=5"}), ConfigError);
  EXPECT_THROW(parse_config("", {"position=[1, 2]"}), ConfigError);
  EXPECT_THROW(parse_config("", {"orientation=1"}), ConfigError);
}

TEST(RenderConfig, RoundTrips) {
  ExperimentConfig c = parse_config("", {"trials=17", "target_aoa=[0.5, -0.25]", "target_aod=[0.125, 1.0]",
                                         "peak_search=single_surface", "base_seed=12345678901"});
  const ExperimentConfig back = parse_config(render_config(c));
  EXPECT_EQ(back.trials, 17u);
  EXPECT_EQ(back.base_seed, 12345678901u);
  ASSERT_TRUE(back.spoof.angles.has_value());
  EXPECT_EQ(back.spoof.angles->aoa(), c.spoof.angles->aoa());
  EXPECT_EQ(back.spoof.angles->aod(), c.spoof.angles->aod());
  EXPECT_EQ(back.peak_search, PeakSearch::kSingleSurface);
  EXPECT_EQ(back.scene.ue_orientation(), c.scene.ue_orientation());
  EXPECT_NEAR(back.noise_psd, c.noise_psd, 1e-12 * c.noise_psd);
  EXPECT_EQ(render_config(back), render_config(c));

  const ExperimentConfig d;
  const ExperimentConfig d2 = parse_config(render_config(d));
  ASSERT_TRUE(d2.spoof.scene.has_value());
  EXPECT_EQ(d2.spoof.scene->ue_position(), d.spoof.scene->ue_position());
}

TEST(ConfigKeys, SuffixesOfKnownKeys) {
  const auto& keys = config_keys();
  EXPECT_NE(std::find(keys.begin(), keys.end(), "sweep.trials"), keys.end());
  EXPECT_NE(std::find(keys.begin(), keys.end(), "spoof.scene.ue.position"), keys.end());
}

TEST(LoadConfig, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/dir/config.cfg"), ConfigError);
}

}  // namespace
}  // namespace angspoof
