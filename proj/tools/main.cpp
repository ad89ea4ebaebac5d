#include "hypdiff/experiment.hpp"
#include "hypdiff/version.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "experiment config file")
        ->required();
    cmd->add_option("--out", flags.out, "output path (overrides output.path)");
    cmd->add_option("--seed", flags.seed, "RNG seed (overrides config seed)");
    cmd->add_option("--format", flags.format, "output format: csv or summary")
        ->check(CLI::IsMember({"csv", "summary"}));
}

int run_experiment(hypdiff::ExperimentKind kind, const CommonFlags& flags) {
    auto config = hypdiff::load_config(flags.config, kind);
    hypdiff::apply_overrides(config, flags.out, flags.seed, flags.format);
    return hypdiff::run(config);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperbolic-diffusion experiment runner"};
    app.set_version_flag("--version", std::string(hypdiff::kVersion));
    app.require_subcommand(1);

    struct Sub {
        hypdiff::ExperimentKind kind;
        CLI::App* cmd;
        CommonFlags flags;
    };
    std::vector<Sub> subs;
    const std::pair<hypdiff::ExperimentKind, const char*> kinds[] = {
        {hypdiff::ExperimentKind::Evolve, "march the damped-wave density forward"},
        {hypdiff::ExperimentKind::KgCheck,
         "verify the two-component operator algebra"},
        {hypdiff::ExperimentKind::Mc, "persistent random walk histogram"},
        {hypdiff::ExperimentKind::ResidualScan,
         "Poisson-kernel residual sweep over lambda"},
        {hypdiff::ExperimentKind::Limits,
         "small-lambda operator and heat-kernel comparisons"},
        {hypdiff::ExperimentKind::Martingale, "expectation defect of a state"},
    };
    subs.reserve(std::size(kinds));
    for (const auto& [kind, help] : kinds) {
        subs.push_back({kind, app.add_subcommand(hypdiff::to_string(kind), help), {}});
        add_common(subs.back().cmd, subs.back().flags);
    }

    auto* cmp = app.add_subcommand("compare", "compare two result files");
    std::string file_a, file_b;
    double tolerance = 0.0;
    cmp->add_option("file_a", file_a, "first result file")->required();
    cmp->add_option("file_b", file_b, "second result file")->required();
    cmp->add_option("--tolerance", tolerance, "max allowed deviation")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmp->parsed()) return hypdiff::compare_files(file_a, file_b, tolerance);
        for (const auto& sub : subs)
            if (sub.cmd->parsed()) return run_experiment(sub.kind, sub.flags);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
