#pragma once

// JSON experiment configuration. The schema is strict: unknown keys are
// rejected at every level, so typos fail loudly instead of running a default.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wzsim/model.hpp"
#include "wzsim/study.hpp"

namespace wzsim {

struct ModelConfig {
    std::string name;
    nlohmann::json params; // validated per model
};

struct SchemeBlock {
    double T = 1.0;
    std::vector<int> ms; // one entry for simulate
    int m_fine = 1024;
    int inner_steps = 0;
    double p = 2.0;
    std::vector<std::string> schemes; // simulate: subset of {wz, em, ee, ref}
    std::optional<StudyPair> pair;    // converge
};

struct MonteCarloBlock {
    int paths = 100;
    std::uint64_t base_seed = 0;
    bool zero_noise = false;
};

struct OutputBlock {
    std::string dir = ".";
    std::string prefix = "run";
    bool bond_prices = false; // hjmm simulate: also emit the terminal term structure
};

struct SyntheticBlock {
    double coefficient = 1.0;
    double exponent = -1.0;
};

struct ExperimentConfig {
    ModelConfig model;
    SchemeBlock scheme;
    MonteCarloBlock monte_carlo;
    OutputBlock output;
    std::optional<SyntheticBlock> synthetic;
};

enum class Command { Simulate, Converge, Validate };

// Parses and validates; throws ConfigError with an explanatory message.
// SPDE_SEED, when set, overrides monte_carlo.base_seed.
ExperimentConfig parse_config(const nlohmann::json& doc, Command cmd);
ExperimentConfig parse_config_file(const std::string& path, Command cmd);

struct BuiltModel {
    SPDEModel model;
    HVector x0;
};

// Instantiates the configured model and initial state ("all" is resolved by
// the validate command, not here).
BuiltModel build_model(const ExperimentConfig& cfg);

} // namespace wzsim
