#pragma once

#include <string>

#include "autoreson/config.hpp"

namespace autoreson {

// Runs one CLI command ("simulate", "asymptote", "stability", "scan",
// "pendulum") against a fully assembled configuration.  Returns the process
// exit code: 0 success, 2 invalid configuration (message on stderr, nothing
// written), 3 integration failure (partial CSV flushed, manifest records the
// error).
int run_command(const std::string& command, const Config& cfg);

} // namespace autoreson
