#pragma once

// Batch front door shared by the CLI and the test suites.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wzsim/config.hpp"
#include "wzsim/schemes.hpp"
#include "wzsim/study.hpp"

namespace wzsim {

struct CommandResult {
    int exit_code = 0;
    std::vector<std::string> files_written;
};

// simulate: one lattice (seed = monte_carlo.base_seed), one trajectory CSV per
// requested scheme.
CommandResult cmd_simulate(const ExperimentConfig& cfg, int workers);

// converge: run_study (or the synthetic power-law self-test) + JSON report +
// per-m CSV; prints one line per m and the fitted slope.
CommandResult cmd_converge(const ExperimentConfig& cfg, int workers);

// validate: model probe suite, semigroup-law suite, moment-formula suite;
// machine-readable JSON; nonzero exit on any failure.
CommandResult cmd_validate(const ExperimentConfig& cfg);

// CSV with "# scheme=... m=... seed=... model=..." header lines and
// time,coeff_0,...,coeff_{d-1} rows.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::string& model_name, std::uint64_t seed);

nlohmann::json report_to_json(const ConvergenceReport& report);
void write_report_csv(std::ostream& os, const ConvergenceReport& report);

// Study spec assembled from a converge config (exposed for the tests).
StudySpec study_spec_from_config(const ExperimentConfig& cfg, int workers);

} // namespace wzsim
