#include <iostream>

#include "CLI11.hpp"
#include "experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Besov norms on Lie groups: characterizations, equivalence ratios, product estimates"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"norm", "every configured characterization for every family member and parameter set"},
        {"equivalence", "pairwise ratio intervals, their drift under refinement, and the embedding check"},
        {"algebra", "Calderon and paraproduct residuals, Leibniz ratios, discrete lemma inequalities"},
        {"heat-check", "semigroup law, mass conservation and L^p contraction of the heat engine"},
        {"report", "equivalence, algebra and heat-check into one output directory"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out, "output directory, overrides output_dir");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : besov::cli::kInvalidConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    std::optional<std::filesystem::path> override_dir;
    if (!out.empty()) override_dir = out;
    return besov::cli::run_command(command, config, override_dir);
}
