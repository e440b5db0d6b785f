#include "rbmprop/commands.hpp"
#include "rbmprop/presets.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonArgs {
    std::string config_file;
    std::string preset;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config_file, "configuration file (section.key = value lines)");
    cmd->add_option("--preset", args.preset, "built-in preset name");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master seed (overrides run.seed)");
}

rbmprop::ExperimentConfig resolve_config(const CommonArgs& args)
{
    rbmprop::ExperimentConfig config;
    if (!args.preset.empty()) config = rbmprop::preset_config(args.preset);
    if (!args.config_file.empty())
        config.merge(rbmprop::ExperimentConfig::from_file(args.config_file));
    return config;
}

std::uint64_t resolve_seed(const CommonArgs& args, const rbmprop::ExperimentConfig& config)
{
    if (args.seed) return *args.seed;
    return config.get_u64("run.seed", 1);
}

void print_result(const rbmprop::CommandResult& result)
{
    std::cout << "wrote " << result.files.size() << " files to " << result.out_dir.string() << "\n";
    for (const auto& file : result.files) std::cout << "  " << file << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"exact inference, propriety diagnostics and Bayesian fitting "
                 "for small binary restricted Boltzmann machines"};
    app.require_subcommand(1);

    CommonArgs diagnose_args, grid_args, simulate_args, fit_args, repro_args;
    std::string repro_target;

    add_common(app.add_subcommand("diagnose", "propriety report for one theta"), diagnose_args);
    add_common(app.add_subcommand("grid", "magnitude-grid propriety study"), grid_args);
    add_common(app.add_subcommand("simulate", "draw a dataset from the exact visible marginal"),
               simulate_args);
    add_common(app.add_subcommand("fit", "Bayesian fitting plus chain diagnostics"), fit_args);
    auto* repro = app.add_subcommand("repro", "canned reproduction runs");
    repro->add_option("target", repro_target, "table1 | table3 | fig12 | fig13 | fig8to11")->required();
    add_common(repro, repro_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        rbmprop::CommandResult result;
        if (app.got_subcommand("diagnose")) {
            const auto config = resolve_config(diagnose_args);
            result = rbmprop::cmd_diagnose(config, diagnose_args.out_dir, resolve_seed(diagnose_args, config));
        } else if (app.got_subcommand("grid")) {
            const auto config = resolve_config(grid_args);
            result = rbmprop::cmd_grid(config, grid_args.out_dir, resolve_seed(grid_args, config));
        } else if (app.got_subcommand("simulate")) {
            const auto config = resolve_config(simulate_args);
            result = rbmprop::cmd_simulate(config, simulate_args.out_dir, resolve_seed(simulate_args, config));
        } else if (app.got_subcommand("fit")) {
            const auto config = resolve_config(fit_args);
            result = rbmprop::cmd_fit(config, fit_args.out_dir, resolve_seed(fit_args, config));
        } else if (app.got_subcommand("repro")) {
            const auto config = resolve_config(repro_args);
            result = rbmprop::cmd_repro(repro_target, config, repro_args.out_dir,
                                        resolve_seed(repro_args, config));
        }
        print_result(result);
        return 0;
    } catch (const rbmprop::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
