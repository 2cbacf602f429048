// JSON configuration parsing, validation and the shipped scenario presets.
#pragma once

#include <string>
#include <vector>

#include "covercs/dynamics.hpp"

namespace covercs {

// Parses and validates a config document; error messages carry the offending
// field path (e.g. "kernel.alpha: ...").
SimConfig parse_config_text(const std::string& text);
SimConfig parse_config_file(const std::string& path);

// Manifold + kernel only, without the summability cross-check; lets the
// kernel validator report on combinations a full config would reject.
std::pair<ManifoldSpec, Kernel> parse_manifold_kernel(const std::string& text);

// Round-trippable echo: parse_config_text(config_to_json(c)) reproduces c.
std::string config_to_json(const SimConfig& config);

std::vector<std::string> preset_names();
std::string preset_json(const std::string& name);
SimConfig preset_config(const std::string& name);

}  // namespace covercs
