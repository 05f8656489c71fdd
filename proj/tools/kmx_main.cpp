// kmx: near-equilibrium kinetic toolkit CLI.
//
// Subcommands select the scenario mode (march run, fixed-point iteration,
// inequality-constant estimation, kernel extraction, benchmark); a sectioned
// key=value config file carries everything else. Exit codes: 0 success,
// 2 configuration error, 3 numerical abort, 4 resource cap.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "kmx/config.hpp"
#include "kmx/scenario.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    bool deterministic = false;
    std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "scenario config file")->required();
    cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
    cmd->add_option("--threads", flags.threads, "worker thread count");
    cmd->add_flag("--deterministic", flags.deterministic,
                  "force the fixed-order reduction path (bitwise identical for any "
                  "thread count)");
    cmd->add_option("--seed", flags.seed, "seed override");
}

int dispatch(const CommonFlags& flags, kmx::RunMode mode) {
    kmx::ScenarioConfig cfg = kmx::parse_config(flags.config_path);
    cfg.mode = mode;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.seed >= 0) {
        cfg.seed = static_cast<std::uint64_t>(flags.seed);
        cfg.init.seed = cfg.seed;
    }
    cfg.threads = flags.threads;
    cfg.deterministic = flags.deterministic;
    return kmx::run_scenario(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"near-equilibrium kinetic toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    CLI::App* run = app.add_subcommand("run", "march the dynamics, write diagnostics CSV");
    CLI::App* picard = app.add_subcommand("picard", "fixed-point iteration on a time window");
    CLI::App* lemmas = app.add_subcommand("lemmas", "empirical inequality constants");
    CLI::App* kernel = app.add_subcommand("kernel", "kernel matrix extraction and bound checks");
    CLI::App* bench = app.add_subcommand("bench", "gain-term timing and determinism check");
    for (CLI::App* cmd : {run, picard, lemmas, kernel, bench}) add_common(cmd, flags);

    CLI11_PARSE(app, argc, argv);

    kmx::RunMode mode = kmx::RunMode::march;
    if (picard->parsed()) mode = kmx::RunMode::picard;
    if (lemmas->parsed()) mode = kmx::RunMode::lemmas;
    if (kernel->parsed()) mode = kmx::RunMode::kernel;
    if (bench->parsed()) mode = kmx::RunMode::bench;

    try {
        return dispatch(flags, mode);
    } catch (const kmx::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const kmx::StabilityError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    } catch (const kmx::ResourceError& e) {
        std::fprintf(stderr, "resource cap: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
