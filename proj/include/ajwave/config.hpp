#pragma once

#include <string>

#include "ajwave/harness.hpp"

// Flat key-value config files (`key = value`, `#` comments). Keys use the
// surface units of the CLI (ns, GHz, dB); unknown or duplicate keys are
// rejected. Defaults reproduce the reference link configuration.

namespace ajwave {

SimConfig default_sim_config();

SimConfig parse_config_text(const std::string& text);
SimConfig load_config_file(const std::string& path);

}  // namespace ajwave
