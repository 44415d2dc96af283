#include <CLI11.hpp>
#include <cstdint>
#include <optional>
#include <string>

#include "roadsim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"roadsim: ring-road traffic simulation and highway cost-benefit analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    bool emit_svg = true;
    int parallel = 1;
    std::string kind;

    CLI::App* simulate = app.add_subcommand("simulate", "Run one simulation from a config file");
    simulate->add_option("--config", config_path, "Scenario config (JSON)")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->add_option("--seed", seed_override, "Override the config seed");
    simulate->add_flag("--svg,!--no-svg", emit_svg, "Emit SVG charts");

    CLI::App* sweep = app.add_subcommand("sweep", "Run an experiment grid");
    sweep->add_option("--kind", kind, "Sweep kind: density or penetration")
        ->required()
        ->check(CLI::IsMember({"density", "penetration"}));
    sweep->add_option("--config", config_path, "Scenario config (JSON)")->required();
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--seed", seed_override, "Override the config seed");
    sweep->add_option("--parallel", parallel, "Max concurrent cells")
        ->check(CLI::PositiveNumber);
    sweep->add_flag("--svg,!--no-svg", emit_svg, "Emit SVG charts");

    CLI::App* cba = app.add_subcommand("cba", "Run the highway cost-benefit comparison");
    cba->add_option("--config", config_path, "CBA profile (JSON)")->required();
    cba->add_option("--out", out_dir, "Output directory")->required();
    cba->add_flag("--svg,!--no-svg", emit_svg, "Emit SVG charts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return roadsim::cli::kExitConfig;
    }

    if (simulate->parsed()) {
        return roadsim::cli::cmd_simulate({config_path, out_dir, seed_override, emit_svg});
    }
    if (sweep->parsed()) {
        return roadsim::cli::cmd_sweep(
            {kind, config_path, out_dir, seed_override, parallel, emit_svg});
    }
    return roadsim::cli::cmd_cba({config_path, out_dir, emit_svg});
}
