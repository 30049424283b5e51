#pragma once

#include "ftecdi/protocol.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ftecdi {

/// Description of one configuration key. Values are given in the key's user
/// unit, optionally followed by that unit (e.g. `c_feed = 5 mM`).
struct ConfigKey {
    std::string name;
    std::string unit;         // empty for dimensionless / counts
    std::string default_value;
    std::string help;
};

const std::vector<ConfigKey>& config_keys();

struct RunConfig {
    CellParams params;
    CycleSpec cycle;
    SimulationOptions simulation;
    std::vector<double> voltages; // sweep, V

    /// Every key with the value in effect, in user units, at full precision.
    /// Feeding this map back through parse_config reproduces the run exactly.
    std::map<std::string, std::string> echo;
};

/// Builds a configuration: built-in defaults, then `file` (key=value text, or a
/// JSON sidecar carrying a "config" object), then `overrides` in order.
/// Throws ConfigError naming every unknown key, malformed value, unit mismatch
/// and violated invariant at once.
RunConfig parse_config(const std::optional<std::string>& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Parses key=value text into ordered pairs; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

} // namespace ftecdi
