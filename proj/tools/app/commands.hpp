#pragma once

#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace tribaker::app {

using Overrides = Settings;

/// Preset a command starts from before user overrides are applied.
std::string default_preset(const std::string& command);

/// Defaults, then `preset`, then `overrides` in order.
RunConfig make_config(const std::string& preset, const Overrides& overrides);

/// Finite-time intensity measures mu^b, mu^f and their product per R.
void cmd_measure(const RunConfig& cfg);
/// Exact resonances per R (cached) plus a spectrum CSV.
void cmd_spectrum(const RunConfig& cfg);
/// Orbit census and the ordered selection for each (R, policy).
void cmd_orbits(const RunConfig& cfg);
/// Minimal scar bases for every (R, policy); idempotent summary CSV.
void cmd_sweep(const RunConfig& cfg);
/// Exact and semiclassical partial quantum repellers, their overlap and the
/// inside/outside scar-function sums.
void cmd_repeller(const RunConfig& cfg);
/// All of the above at their figure presets; with large=true also the
/// N = 729 spot check.
void cmd_reproduce(const Overrides& overrides);

/// Large-N spot check (R=0.01 repeller-only, R=0.1 with 50 outside orbits).
void cmd_large(const RunConfig& cfg);

}  // namespace tribaker::app
