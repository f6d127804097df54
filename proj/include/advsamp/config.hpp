#pragma once

#include <string>
#include <vector>

#include "advsamp/alloop.hpp"

namespace advsamp {

// Nested-section key-value config: `[section]` headers, `key = value` lines,
// `#` comments. An empty path (or empty file) yields the default double-well
// configuration. Overrides are `section.key=value` strings.
LoopConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

// Canonical resolved snapshot; parsing it back reproduces the config.
std::string serialize_config(const LoopConfig& cfg);

}  // namespace advsamp
