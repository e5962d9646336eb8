#pragma once

#include <cstdint>
#include <string>

namespace mext {

// One CLI invocation: `manifold-extend <command> --config <path> --out <dir>
// [--seed N]`.
struct RunDescriptor {
    std::string command; // build-domain | extend | sweep | vortex | micromag | selftest
    std::string configPath;
    std::string outputDir;
    std::uint64_t seed = 42;
};

// Parses and validates the config, writes outputDir/resolved.cfg, runs the
// study, and emits report.json plus the command's CSV/field files. Exit
// status: 0 success (hypothesis warnings included), 1 contract violation,
// 2 configuration error. Failures are logged to stderr with the violated
// contract's message.
int run_descriptor(const RunDescriptor& run);

} // namespace mext
