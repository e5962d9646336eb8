#include <string>

#include <CLI11.hpp>

#include "mext/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"perforated-domain builder and manifold-constrained extension toolkit"};
    app.require_subcommand(1);

    mext::RunDescriptor run;
    const std::pair<const char*, const char*> commands[] = {
        {"build-domain", "build the perforated grid and report its measures"},
        {"extend", "run the constrained extension pipeline on a fixture"},
        {"sweep", "epsilon sweep of the constrained pipeline"},
        {"vortex", "disk vortex energies across resolutions"},
        {"micromag", "micromagnetic homogenization study"},
        {"selftest", "built-in invariant suite on canonical fixtures"},
    };
    for (auto [name, desc] : commands) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", run.configPath, "flat key = value config file")->required();
        sub->add_option("--out", run.outputDir, "output directory")->required();
        sub->add_option("--seed", run.seed, "global PRNG seed (default 42)");
        sub->callback([&run, sub] { run.command = sub->get_name(); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad usage is a configuration error
    }
    return mext::run_descriptor(run);
}
