// synthcoupling <spectrum|quench|adiabatic|sweep> --config <path> --out <dir>
//               [--cutoff N] [--tolerance x] [--frame lab|squeezed]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure
// (details in <out>/diagnostic.txt).

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "synthcoupling/cli/runners.hpp"

namespace sc = synthcoupling;
namespace cli = synthcoupling::cli;

namespace {

void write_diagnostic(const std::filesystem::path& out, const std::string& what,
                      const std::optional<cli::ExperimentConfig>& config)
{
    cli::Manifest d;
    d.set("failure", "tool", cli::tool_version);
    d.set("failure", "error", what);
    if (config)
        for (const auto& [k, v] : config->describe())
            d.set("config", k, v);
    try {
        std::filesystem::create_directories(out);
        cli::write_atomic(out / "diagnostic.txt", d.str());
    } catch (const std::exception& e) {
        std::cerr << "could not write diagnostic file: " << e.what() << "\n";
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Parametrically enhanced qubit-cavity coupling: experiment runner"};
    std::string experiment, config_path, out_dir, frame;
    std::optional<int> cutoff;
    std::optional<double> tolerance;
    app.add_option("experiment", experiment, "spectrum, quench, adiabatic or sweep")
        ->required()
        ->check(CLI::IsMember({"spectrum", "quench", "adiabatic", "sweep"}));
    app.add_option("--config", config_path, "key = value configuration file")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--cutoff", cutoff, "run at this Fock cutoff only (no escalation)");
    app.add_option("--tolerance", tolerance, "integrator relative tolerance");
    app.add_option("--frame", frame, "simulation frame")->check(CLI::IsMember({"lab", "squeezed"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    std::optional<cli::ExperimentConfig> config;
    try {
        const auto selected = cli::parse_experiment(experiment);
        config = cli::load_config(config_path, selected);
        if (config->experiment != selected)
            throw sc::ConfigError("config file is for experiment '" + cli::to_string(config->experiment) +
                                  "', not '" + experiment + "'");
        if (cutoff) {
            config->cutoff.initial = *cutoff;
            config->cutoff.fixed = true;
        }
        if (tolerance)
            config->tolerance = *tolerance;
        if (!frame.empty())
            config->frame = cli::parse_frame(frame);
        config->validate();
    } catch (const sc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        const auto outcome = cli::run_experiment(*config, out_dir);
        std::cout << outcome.manifest.str();
        return 0;
    } catch (const sc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        write_diagnostic(out_dir, e.what(), config);
        return 3;
    }
}
