// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#ifndef ANGSPOOF_EXPERIMENT_CONFIG_HPP
#define ANGSPOOF_EXPERIMENT_CONFIG_HPP

#include "angspoof/experiment_harness.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace angspoof {

/// Parses a config document and applies `key=value` overrides on top of it.
/// Keys are dotted paths (`sweep.trials`); any unique suffix of a known path
/// is accepted (`trials`). Throws ConfigError on unknown keys, bad values or
/// ambiguous override keys.
ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides = {});

/// Reads and parses a config file.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// Canonical text of a config, in the same grammar `parse_config` accepts.
/// parse_config(render_config(c)) reproduces c up to rounding in the
/// dBm/Hz noise conversion.
std::string render_config(const ExperimentConfig& config);

/// Every leaf key the grammar knows about, as dotted paths.
const std::vector<std::string>& config_keys();

}  // namespace angspoof

#endif  // ANGSPOOF_EXPERIMENT_CONFIG_HPP
