// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/experiment_config.hpp"

#include "angspoof/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace angspoof {

namespace {

using Flat = std::map<std::string, YAML::Node>;

std::vector<std::string> scene_keys(const std::string& prefix) {
  return {prefix + ".bs.position", prefix + ".bs.orientation", prefix + ".ue.position",
          prefix + ".ue.orientation", prefix + ".scatterers"};
}

std::vector<std::string> build_keys() {
  std::vector<std::string> keys{"mode"};
  for (const auto& k : scene_keys("scene")) keys.push_back(k);
  for (const auto& k : scene_keys("spoof.scene")) keys.push_back(k);
  for (const char* k : {"spoof.target_aoa", "spoof.target_aod", "spoof.p_max", "spoof.max_iters",
                        "spoof.tol", "spoof.init_seed", "spoof.comm_precoder", "arrays.n_r",
                        "arrays.n_t", "sounding.measurements", "sounding.symbols",
                        "link.carrier_freq_hz", "link.bandwidth_hz", "link.noise_psd_dbm_hz",
                        "link.reflection_factor", "link.snr_convention", "sweep.power_dbm",
                        "sweep.trials", "sweep.base_seed", "sweep.gain_variation",
                        "estimator.grid_step_deg", "estimator.min_separation",
                        "estimator.peak_search"}) {
    keys.emplace_back(k);
  }
  return keys;
}

bool is_key(const std::string& path) {
  const auto& keys = config_keys();
  return std::find(keys.begin(), keys.end(), path) != keys.end();
}

bool is_section(const std::string& path) {
  for (const auto& k : config_keys()) {
    if (k.size() > path.size() && k.compare(0, path.size(), path) == 0 && k[path.size()] == '.') {
      return true;
    }
  }
  return false;
}

void flatten(const YAML::Node& node, const std::string& path, Flat& out) {
  if (!node.IsMap()) {
    throw ConfigError("section '" + path + "' must be a mapping");
  }
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string full = path.empty() ? key : path + "." + key;
    if (is_key(full)) {
      out[full] = kv.second;
    } else if (is_section(full)) {
      flatten(kv.second, full, out);
    } else {
      throw ConfigError("unknown config key '" + full + "'");
    }
  }
}

std::string resolve_key(const std::string& key) {
  if (is_key(key)) return key;
  std::vector<std::string> matches;
  for (const auto& k : config_keys()) {
    if (k.size() > key.size() && k.compare(k.size() - key.size(), key.size(), key) == 0 &&
        k[k.size() - key.size() - 1] == '.') {
      matches.push_back(k);
    }
  }
  if (matches.empty()) throw ConfigError("unknown override key '" + key + "'");
  if (matches.size() > 1) {
    std::string list;
    for (const auto& m : matches) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("ambiguous override key '" + key + "' (" + list + ")");
  }
  return matches.front();
}

void apply_override(const std::string& entry, Flat& flat) {
  const auto eq = entry.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + entry + "' is not of the form key=value");
  }
  const std::string key = resolve_key(entry.substr(0, eq));
  try {
    flat[key] = YAML::Load(entry.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + entry + "': " + e.what());
  }
}

template <typename T>
T scalar(const Flat& flat, const std::string& key) {
  try {
    return flat.at(key).as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "' has an invalid value");
  }
}

std::size_t count(const Flat& flat, const std::string& key) {
  const auto v = scalar<long long>(flat, key);
  if (v < 0) throw ConfigError("config key '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::uint64_t seed(const Flat& flat, const std::string& key) {
  return scalar<std::uint64_t>(flat, key);
}

std::vector<double> doubles(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ConfigError("config key '" + key + "' must be a list");
  std::vector<double> out;
  try {
    for (const auto& v : node) out.push_back(v.as<double>());
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "' must hold numbers");
  }
  return out;
}

Point2 point(const YAML::Node& node, const std::string& key) {
  const auto v = doubles(node, key);
  if (v.size() == 3) throw ConfigError("config key '" + key + "': 3-D positions are not supported");
  if (v.size() != 2) throw ConfigError("config key '" + key + "' must be [x, y]");
  return {v[0], v[1]};
}

template <typename E>
E choice(const Flat& flat, const std::string& key,
         std::initializer_list<std::pair<const char*, E>> options) {
  const auto s = scalar<std::string>(flat, key);
  for (const auto& [name, value] : options) {
    if (s == name) return value;
  }
  std::string list;
  for (const auto& [name, value] : options) list += (list.empty() ? "" : ", ") + std::string(name);
  throw ConfigError("config key '" + key + "' must be one of: " + list);
}

bool has_any(const Flat& flat, const std::string& prefix) {
  return std::any_of(flat.begin(), flat.end(), [&](const auto& kv) {
    return kv.first.compare(0, prefix.size() + 1, prefix + ".") == 0;
  });
}

SceneGeometry scene_from(const Flat& flat, const std::string& prefix, const SceneGeometry& base) {
  auto get = [&](const std::string& leaf) -> const YAML::Node* {
    auto it = flat.find(prefix + "." + leaf);
    return it == flat.end() ? nullptr : &it->second;
  };
  Point2 bs = base.bs_position();
  Point2 ue = base.ue_position();
  double bs_or = base.bs_orientation();
  double ue_or = base.ue_orientation();
  std::vector<Point2> scatterers = base.scatterers();
  if (auto* n = get("bs.position")) bs = point(*n, prefix + ".bs.position");
  if (auto* n = get("ue.position")) ue = point(*n, prefix + ".ue.position");
  if (get("bs.orientation")) bs_or = scalar<double>(flat, prefix + ".bs.orientation");
  if (get("ue.orientation")) ue_or = scalar<double>(flat, prefix + ".ue.orientation");
  if (auto* n = get("scatterers")) {
    if (!n->IsSequence()) throw ConfigError("config key '" + prefix + ".scatterers' must be a list");
    scatterers.clear();
    for (const auto& s : *n) scatterers.push_back(point(s, prefix + ".scatterers"));
  }
  try {
    return SceneGeometry(bs, bs_or, ue, ue_or, scatterers);
  } catch (const std::exception& e) {
    throw ConfigError("section '" + prefix + "': " + e.what());
  }
}

ExperimentConfig build(const Flat& flat) {
  ExperimentConfig c;
  auto has = [&](const char* key) { return flat.count(key) != 0; };

  if (has("mode")) {
    c.mode = choice<Mode>(flat, "mode",
                          {{"no_spoof", Mode::kNoSpoof}, {"precoder_spoof", Mode::kPrecoderSpoof}});
  }
  if (has_any(flat, "scene")) c.scene = scene_from(flat, "scene", c.scene);

  if (has("spoof.target_aoa") || has("spoof.target_aod")) {
    if (!has("spoof.target_aoa") || !has("spoof.target_aod")) {
      throw ConfigError("spoof.target_aoa and spoof.target_aod must be given together");
    }
    try {
      c.spoof.angles = AngleVector(doubles(flat.at("spoof.target_aoa"), "spoof.target_aoa"),
                                   doubles(flat.at("spoof.target_aod"), "spoof.target_aod"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("spoof target angles: ") + e.what());
    }
    c.spoof.scene.reset();
  } else if (has_any(flat, "spoof.scene")) {
    c.spoof.scene = scene_from(flat, "spoof.scene", *c.spoof.scene);
  }
  if (has("spoof.p_max")) c.spoof.p_max = scalar<double>(flat, "spoof.p_max");
  if (has("spoof.max_iters")) c.spoof.max_iters = count(flat, "spoof.max_iters");
  if (has("spoof.tol")) c.spoof.tol = scalar<double>(flat, "spoof.tol");
  if (has("spoof.init_seed")) c.spoof.init_seed = seed(flat, "spoof.init_seed");
  if (has("spoof.comm_precoder")) {
    c.spoof.comm_precoder =
        choice<CommPrecoder>(flat, "spoof.comm_precoder",
                             {{"transmitted", CommPrecoder::kTransmitted},
                              {"nominal", CommPrecoder::kNominal}});
  }

  if (has("arrays.n_r")) c.n_r = count(flat, "arrays.n_r");
  if (has("arrays.n_t")) c.n_t = count(flat, "arrays.n_t");
  if (has("sounding.measurements")) c.measurements = count(flat, "sounding.measurements");
  if (has("sounding.symbols")) c.symbols = count(flat, "sounding.symbols");

  if (has("link.carrier_freq_hz")) c.carrier_freq = scalar<double>(flat, "link.carrier_freq_hz");
  if (has("link.bandwidth_hz")) c.bandwidth = scalar<double>(flat, "link.bandwidth_hz");
  if (has("link.noise_psd_dbm_hz")) {
    c.noise_psd = dbm_to_watts(scalar<double>(flat, "link.noise_psd_dbm_hz"));
  }
  if (has("link.reflection_factor")) {
    c.reflection_factor = scalar<double>(flat, "link.reflection_factor");
  }
  if (has("link.snr_convention")) {
    c.snr_convention =
        choice<SnrConvention>(flat, "link.snr_convention",
                              {{"bandwidth_noise", SnrConvention::kBandwidthNoise},
                               {"spectral_density", SnrConvention::kSpectralDensity}});
  }

  if (has("sweep.power_dbm")) {
    const YAML::Node& n = flat.at("sweep.power_dbm");
    c.power_grid_dbm = n.IsScalar() ? std::vector<double>{scalar<double>(flat, "sweep.power_dbm")}
                                    : doubles(n, "sweep.power_dbm");
  }
  if (has("sweep.trials")) c.trials = count(flat, "sweep.trials");
  if (has("sweep.base_seed")) c.base_seed = seed(flat, "sweep.base_seed");
  if (has("sweep.gain_variation")) {
    c.variation = choice<GainVariation>(flat, "sweep.gain_variation",
                                        {{"noise_and_phase", GainVariation::kNoiseAndPhase},
                                         {"noise_only", GainVariation::kNoiseOnly}});
  }

  if (has("estimator.grid_step_deg")) {
    c.grid_step_deg = scalar<double>(flat, "estimator.grid_step_deg");
  }
  if (has("estimator.min_separation")) {
    c.min_separation = count(flat, "estimator.min_separation");
  }
  if (has("estimator.peak_search")) {
    c.peak_search = choice<PeakSearch>(flat, "estimator.peak_search",
                                       {{"successive", PeakSearch::kSuccessive},
                                        {"single_surface", PeakSearch::kSingleSurface}});
  }
  c.validate();
  return c;
}

void emit_point(YAML::Emitter& out, const Point2& p) {
  out << YAML::Flow << YAML::BeginSeq << p.x << p.y << YAML::EndSeq;
}

void emit_scene(YAML::Emitter& out, const SceneGeometry& s) {
  out << YAML::BeginMap;
  out << YAML::Key << "bs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "position" << YAML::Value;
  emit_point(out, s.bs_position());
  out << YAML::Key << "orientation" << YAML::Value << s.bs_orientation() << YAML::EndMap;
  out << YAML::Key << "ue" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "position" << YAML::Value;
  emit_point(out, s.ue_position());
  out << YAML::Key << "orientation" << YAML::Value << s.ue_orientation() << YAML::EndMap;
  out << YAML::Key << "scatterers" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& p : s.scatterers()) emit_point(out, p);
  out << YAML::EndSeq << YAML::EndMap;
}

void emit_list(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << x;
  out << YAML::EndSeq;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = build_keys();
  return keys;
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  Flat flat;
  try {
    const YAML::Node root = YAML::Load(text);
    if (root.IsDefined() && !root.IsNull()) flatten(root, "", flat);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  for (const auto& o : overrides) apply_override(o, flat);
  return build(flat);
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

std::string render_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(std::numeric_limits<double>::max_digits10);
  out << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value
      << (c.mode == Mode::kNoSpoof ? "no_spoof" : "precoder_spoof");
  out << YAML::Key << "scene" << YAML::Value;
  emit_scene(out, c.scene);

  out << YAML::Key << "spoof" << YAML::Value << YAML::BeginMap;
  if (c.spoof.angles) {
    out << YAML::Key << "target_aoa" << YAML::Value;
    emit_list(out, c.spoof.angles->aoa());
    out << YAML::Key << "target_aod" << YAML::Value;
    emit_list(out, c.spoof.angles->aod());
  } else if (c.spoof.scene) {
    out << YAML::Key << "scene" << YAML::Value;
    emit_scene(out, *c.spoof.scene);
  }
  out << YAML::Key << "p_max" << YAML::Value << c.spoof.p_max;
  out << YAML::Key << "max_iters" << YAML::Value << c.spoof.max_iters;
  out << YAML::Key << "tol" << YAML::Value << c.spoof.tol;
  out << YAML::Key << "init_seed" << YAML::Value << c.spoof.init_seed;
  out << YAML::Key << "comm_precoder" << YAML::Value
      << (c.spoof.comm_precoder == CommPrecoder::kTransmitted ? "transmitted" : "nominal");
  out << YAML::EndMap;

  out << YAML::Key << "arrays" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_r" << YAML::Value << c.n_r;
  out << YAML::Key << "n_t" << YAML::Value << c.n_t << YAML::EndMap;

  out << YAML::Key << "sounding" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "measurements" << YAML::Value << c.measurements;
  out << YAML::Key << "symbols" << YAML::Value << c.symbols << YAML::EndMap;

  out << YAML::Key << "link" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "carrier_freq_hz" << YAML::Value << c.carrier_freq;
  out << YAML::Key << "bandwidth_hz" << YAML::Value << c.bandwidth;
  out << YAML::Key << "noise_psd_dbm_hz" << YAML::Value << watts_to_dbm(c.noise_psd);
  out << YAML::Key << "reflection_factor" << YAML::Value << c.reflection_factor;
  out << YAML::Key << "snr_convention" << YAML::Value
      << (c.snr_convention == SnrConvention::kBandwidthNoise ? "bandwidth_noise"
                                                             : "spectral_density");
  out << YAML::EndMap;

  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "power_dbm" << YAML::Value;
  emit_list(out, c.power_grid_dbm);
  out << YAML::Key << "trials" << YAML::Value << c.trials;
  out << YAML::Key << "base_seed" << YAML::Value << c.base_seed;
  out << YAML::Key << "gain_variation" << YAML::Value
      << (c.variation == GainVariation::kNoiseAndPhase ? "noise_and_phase" : "noise_only");
  out << YAML::EndMap;

  out << YAML::Key << "estimator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "grid_step_deg" << YAML::Value << c.grid_step_deg;
  out << YAML::Key << "min_separation" << YAML::Value << c.min_separation;
  out << YAML::Key << "peak_search" << YAML::Value
      << (c.peak_search == PeakSearch::kSuccessive ? "successive" : "single_surface");
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace angspoof
