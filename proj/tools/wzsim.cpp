#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wzsim/commands.hpp"
#include "wzsim/errors.hpp"
#include "wzsim/version.hpp"

namespace {

int dispatch(wzsim::Command cmd, const std::string& config_path, int workers,
             const std::string& out_dir) {
    wzsim::ExperimentConfig cfg = wzsim::parse_config_file(config_path, cmd);
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    wzsim::CommandResult result;
    switch (cmd) {
        case wzsim::Command::Simulate:
            result = wzsim::cmd_simulate(cfg, workers);
            break;
        case wzsim::Command::Converge:
            result = wzsim::cmd_converge(cfg, workers);
            break;
        case wzsim::Command::Validate:
            result = wzsim::cmd_validate(cfg);
            break;
    }
    for (const auto& f : result.files_written) std::cout << "wrote " << f << "\n";
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wong-Zakai / exponential Euler SPDE simulator"};
    app.set_version_flag("--version", wzsim::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int workers = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--workers", workers, "worker thread count")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "write scheme trajectories on one lattice");
    add_common(simulate);
    CLI::App* converge = app.add_subcommand("converge", "run a coupled convergence study");
    add_common(converge);
    CLI::App* validate = app.add_subcommand("validate", "run the model and moment probe suites");
    add_common(validate);

    CLI11_PARSE(app, argc, argv);

    wzsim::Command cmd = wzsim::Command::Simulate;
    if (app.got_subcommand(converge)) cmd = wzsim::Command::Converge;
    if (app.got_subcommand(validate)) cmd = wzsim::Command::Validate;

    try {
        return dispatch(cmd, config_path, workers, out_dir);
    } catch (const wzsim::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << " at t=" << e.time()
                  << " (lattice seed " << e.seed() << ")\n";
        return 3;
    } catch (const wzsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const wzsim::ArgumentError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const wzsim::StructuralError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
