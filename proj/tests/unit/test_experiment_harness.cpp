// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/errors.hpp"
#include "angspoof/experiment_harness.hpp"
#include "support/test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace angspoof {
namespace {

using testing::Gen;
using testing::kDeg;
using testing::kPi;

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_r = 8;
  c.n_t = 4;
  c.measurements = 8;
  c.symbols = 8;
  c.grid_step_deg = 1.0;
  c.trials = 3;
  c.power_grid_dbm = {0.0, 20.0};
  return c;
}

TEST(ReferenceScenes, Geometry) {
  const SceneGeometry s = reference_scene();
  EXPECT_EQ(s.ue_position(), (Point2{10, 5}));
  EXPECT_NEAR(s.ue_orientation(), -2 * kPi / 3, 1e-15);
  ASSERT_EQ(s.scatterers().size(), 1u);
  EXPECT_EQ(s.scatterers()[0], (Point2{7, -15}));
  const SceneGeometry v = reference_spoof_scene();
  EXPECT_EQ(v.ue_position(), (Point2{30, 20}));
  EXPECT_EQ(v.scatterers()[0], (Point2{20, -10}));
}

TEST(PowerConversion, RoundTrip) {
  EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_DOUBLE_EQ(dbm_to_watts(0.0), 1e-3);
  EXPECT_NEAR(watts_to_dbm(dbm_to_watts(-174.0)), -174.0, 1e-12);
  const ExperimentConfig c;
  EXPECT_NEAR(c.noise_psd * c.bandwidth, 1.58e-12, 0.01e-12);
}

TEST(ConfigValidation, RejectsBadValues) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.trials = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig();
  c.power_grid_dbm.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig();
  c.grid_step_deg = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig();
  c.spoof.scene.reset();
  EXPECT_THROW(c.validate(), ConfigError);
  c.mode = Mode::kNoSpoof;
  EXPECT_NO_THROW(c.validate());
  c = ExperimentConfig();
  c.spoof.angles = AngleVector({0.1}, {0.2});
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(SpoofingDeviation, Examples) {
  const AngleVector t({0.588, -0.4636}, {0.588, 1.249});
  const Deviation same = spoofing_deviation(t, t);
  EXPECT_EQ(same.aoa, 0.0);
  EXPECT_EQ(same.aod, 0.0);

  const Deviation one = spoofing_deviation(AngleVector({0.3 + kDeg}, {-0.2}), AngleVector({0.3}, {-0.2}));
  EXPECT_NEAR(one.aoa, kDeg, 1e-15);
  EXPECT_EQ(one.aod, 0.0);

  const AngleVector swapped({-0.4636, 0.588}, {1.249, 0.588});
  const Deviation sw = spoofing_deviation(swapped, t);
  EXPECT_EQ(sw.aoa, 0.0);
  EXPECT_EQ(sw.aod, 0.0);

  EXPECT_THROW(spoofing_deviation(AngleVector({0.1}, {0.1}), t), InvalidArgument);
}

TEST(SpoofingDeviation, WrapsDifferences) {
  const Deviation d = spoofing_deviation(AngleVector({kPi - 0.01}, {0.0}), AngleVector({-kPi + 0.01}, {0.0}));
  EXPECT_NEAR(d.aoa, 0.02, 1e-12);
}

TEST(SpoofingDeviationProperty, MatchesBruteForceAssignment) {
  Gen gen(71);
  for (int t = 0; t < 100; ++t) {
    const std::size_t L = gen.index(1, 4);
    const AngleVector est = gen.angle_vector(L);
    const AngleVector ref = gen.angle_vector(L);
    std::vector<std::size_t> perm(L);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    double best_a = 0.0;
    double best_d = 0.0;
    do {
      double a = 0.0;
      double d = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        const double da = std::remainder(est.aoa()[perm[l]] - ref.aoa()[l], 2 * kPi);
        const double dd = std::remainder(est.aod()[perm[l]] - ref.aod()[l], 2 * kPi);
        a += da * da;
        d += dd * dd;
      }
      if (a + d < best) {
        best = a + d;
        best_a = std::sqrt(a);
        best_d = std::sqrt(d);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    const Deviation dev = spoofing_deviation(est, ref);
    EXPECT_NEAR(dev.aoa, best_a, 1e-12);
    EXPECT_NEAR(dev.aod, best_d, 1e-12);
  }
}

TEST(Rmse, Formula) {
  EXPECT_EQ(rmse({}), 0.0);
  EXPECT_DOUBLE_EQ(rmse({3.0, 4.0}), std::sqrt(12.5));
}

TEST(DeriveSeed, StableAndDistinct) {
  EXPECT_EQ(derive_seed(1, 2, 3, 4), derive_seed(1, 2, 3, 4));
  EXPECT_NE(derive_seed(1, 2, 3, 4), derive_seed(1, 2, 4, 3));
  EXPECT_NE(derive_seed(1, 2, 3, 4), derive_seed(2, 2, 3, 4));
  EXPECT_NE(derive_seed(1, 1, 0), derive_seed(1, 2, 0));
}

TEST(PrepareScenario, SpoofDesignOnlyWhenAsked) {
  ExperimentConfig c = small_config();
  c.mode = Mode::kNoSpoof;
  const Scenario plain = prepare_scenario(c);
  EXPECT_FALSE(plain.spoof.has_value());
  ASSERT_TRUE(plain.target_angles.has_value());
  const Scenario forced = prepare_scenario(c, true);
  ASSERT_TRUE(forced.spoof.has_value());
  EXPECT_DOUBLE_EQ(forced.problem->p_max(), 2.0);
  c.spoof.p_max = 5.0;
  EXPECT_DOUBLE_EQ(prepare_scenario(c, true).problem->p_max(), 5.0);
  c.spoof.angles = AngleVector({0.1, 0.2}, {0.3, -0.4});
  const Scenario explicit_targets = prepare_scenario(c);
  EXPECT_EQ(explicit_targets.target_angles->aoa(), (std::vector<double>{0.1, 0.2}));
}

TEST(RunSweep, NoiselessNoSpoofIsAccurate) {
  ExperimentConfig c;
  c.mode = Mode::kNoSpoof;
  c.trials = 1;
  c.noise_psd = dbm_to_watts(-400.0);
  c.power_grid_dbm = {20.0};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.per_power.size(), 1u);
  EXPECT_LE(r.per_power[0].rmse_aoa_deg, 0.2);
  EXPECT_LE(r.per_power[0].rmse_aod_deg, 0.2);
  EXPECT_EQ(r.per_power[0].trials_used, 1u);
}

TEST(RunSweep, SortedRecordsAndRederivableRmse) {
  ExperimentConfig c = small_config();
  c.power_grid_dbm = {20.0, -10.0, 5.0};
  for (Mode mode : {Mode::kNoSpoof, Mode::kPrecoderSpoof}) {
    c.mode = mode;
    const SweepResult r = run_sweep(c);
    ASSERT_EQ(r.per_power.size(), 3u);
    ASSERT_EQ(r.trials.size(), 3u * c.trials);
    for (std::size_t p = 0; p < 3; ++p) {
      if (p > 0) EXPECT_LT(r.per_power[p - 1].power_dbm, r.per_power[p].power_dbm);
      std::vector<double> a;
      std::vector<double> d;
      double se = 0.0;
      for (const auto& t : r.trials) {
        if (t.power_dbm != r.per_power[p].power_dbm) continue;
        a.push_back(t.eps_aoa_deg);
        d.push_back(t.eps_aod_deg);
        se += t.spectral_efficiency;
        EXPECT_GE(t.eps_aoa_deg, 0.0);
      }
      ASSERT_EQ(a.size(), c.trials);
      EXPECT_DOUBLE_EQ(r.per_power[p].rmse_aoa_deg, rmse(a));
      EXPECT_DOUBLE_EQ(r.per_power[p].rmse_aod_deg, rmse(d));
      EXPECT_DOUBLE_EQ(r.per_power[p].mean_spectral_efficiency, se / c.trials);
      EXPECT_GE(r.per_power[p].rmse_aoa_deg, 0.0);
    }
  }
}

TEST(RunSweep, Deterministic) {
  ExperimentConfig c = small_config();
  std::ostringstream a;
  std::ostringstream b;
  write_trials_csv(a, run_sweep(c));
  write_trials_csv(b, run_sweep(c));
  EXPECT_EQ(a.str(), b.str());
  c.base_seed = 2;
  std::ostringstream other;
  write_trials_csv(other, run_sweep(c));
  EXPECT_NE(a.str(), other.str());
}

TEST(RunSweep, PowerGridSubsetReproducesTrials) {
  // Noise seeds follow the sorted power index, gains follow the trial index.
  ExperimentConfig c = small_config();
  c.mode = Mode::kNoSpoof;
  c.power_grid_dbm = {0.0, 20.0};
  const SweepResult full = run_sweep(c);
  c.power_grid_dbm = {20.0, 0.0};
  const SweepResult reordered = run_sweep(c);
  for (std::size_t k = 0; k < full.trials.size(); ++k) {
    EXPECT_EQ(full.trials[k].eps_aoa_deg, reordered.trials[k].eps_aoa_deg);
  }
}

TEST(RunSweep, NoSpoofRmseFallsWithPower) {
  ExperimentConfig c;
  c.mode = Mode::kNoSpoof;
  c.trials = 50;
  c.power_grid_dbm = {-10.0, 20.0};
  const SweepResult r = run_sweep(c);
  EXPECT_LE(r.per_power[1].rmse_aoa_deg, r.per_power[0].rmse_aoa_deg);
  EXPECT_LE(r.per_power[1].rmse_aod_deg, r.per_power[0].rmse_aod_deg);
}

TEST(RunSweep, NoiseOnlyVariationKeepsGains) {
  ExperimentConfig c = small_config();
  c.mode = Mode::kNoSpoof;
  c.variation = GainVariation::kNoiseOnly;
  c.noise_psd = dbm_to_watts(-400.0);
  const SweepResult r = run_sweep(c);
  for (const auto& t : r.trials) {
    EXPECT_EQ(t.spectral_efficiency, r.trials[t.power_dbm == 0.0 ? 0 : c.trials].spectral_efficiency);
  }
}

TEST(RunSweep, ScenarioWithoutDesignRejectedInSpoofMode) {
  ExperimentConfig c = small_config();
  c.mode = Mode::kNoSpoof;
  const Scenario sc = prepare_scenario(c);
  c.mode = Mode::kPrecoderSpoof;
  EXPECT_THROW(run_sweep(c, sc), InvalidArgument);
}

TEST(SweepCsv, Format) {
  ExperimentConfig c = small_config();
  const SweepResult r = run_sweep(c);
  std::ostringstream out;
  write_sweep_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "power_dbm,rmse_aoa_deg,rmse_aod_deg,se_bps_hz");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, c.power_grid_dbm.size());
}

TEST(RateCurve, NoSpoofSlopeAndSpoofBelow) {
  ExperimentConfig c;
  c.trials = 10;
  c.power_grid_dbm = {35.0, 40.0, 45.0};
  c.spoof.scene = SceneGeometry({0, 0}, 0, {30, 5}, -kPi, {{20, -10}});
  const auto curve = rate_curve(c);
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_NEAR(curve[2].no_spoof - curve[1].no_spoof, 1.661, 0.05);
  for (const auto& p : curve) EXPECT_LT(p.spoof, p.no_spoof);
  std::ostringstream out;
  write_rate_csv(out, curve);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "power_dbm,se_no_spoof_bps_hz,se_spoof_bps_hz");
}

std::pair<double, double> surface_argmin(const Heatmap& h) {
  const arma::uword k = h.cost.index_min();
  return {h.grid.aoa_points[k % h.cost.n_rows], h.grid.aod_points[k / h.cost.n_rows]};
}

TEST(Heatmap, NoSpoofPeaksAtTrueAngles) {
  const ExperimentConfig c;
  const Heatmap h = generate_heatmap(c, Mode::kNoSpoof);
  EXPECT_EQ(h.cost.n_elem, h.grid.aoa_points.size() * h.grid.aod_points.size());
  const auto [aoa, aod] = surface_argmin(h);
  const AngleVector truth = scene_to_angles(reference_scene());
  EXPECT_NEAR(aoa, truth.aoa()[0], h.grid.step);
  EXPECT_NEAR(aod, truth.aod()[0], h.grid.step);
  // The weaker path is recovered by the estimator even where the
  // single-path surface is dominated by line-of-sight sidelobes.
  std::size_t estimates = 0;
  for (const auto& m : h.markers) {
    if (m.kind != "estimate") continue;
    ++estimates;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < truth.size(); ++l) {
      nearest = std::min(nearest, std::max(std::abs(m.aoa - truth.aoa()[l]),
                                           std::abs(m.aod - truth.aod()[l])));
    }
    EXPECT_LE(nearest, 0.2 * kDeg);
  }
  EXPECT_EQ(estimates, 2u);

  std::size_t trues = 0;
  for (const auto& m : h.markers) trues += m.kind == "true";
  EXPECT_EQ(trues, 2u);
}

TEST(Heatmap, DesignGainsPeakAtTargets) {
  const ExperimentConfig c;
  const Heatmap h = generate_heatmap(c, Mode::kPrecoderSpoof, HeatmapGains::kDesign);
  const auto [aoa, aod] = surface_argmin(h);
  const AngleVector target = scene_to_angles(reference_spoof_scene());
  const bool near0 = std::abs(aoa - target.aoa()[0]) <= h.grid.step && std::abs(aod - target.aod()[0]) <= h.grid.step;
  const bool near1 = std::abs(aoa - target.aoa()[1]) <= h.grid.step && std::abs(aod - target.aod()[1]) <= h.grid.step;
  EXPECT_TRUE(near0 || near1);
  for (const auto& m : h.markers) {
    if (m.kind != "estimate") continue;
    EXPECT_NEAR(m.aoa, target.aoa()[m.path], h.grid.step);
    EXPECT_NEAR(m.aod, target.aod()[m.path], h.grid.step);
  }
  std::ostringstream out;
  write_heatmap_markers_csv(out, h);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "kind,path,aoa_deg,aod_deg");
}

}  // namespace
}  // namespace angspoof
