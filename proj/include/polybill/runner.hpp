#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "polybill/config.hpp"

namespace polybill {

struct RunResult {
    std::string summary;  // one line with the key scalars
    std::vector<std::filesystem::path> files;
};

// Runs cfg.command and writes its artifacts under cfg.output.
// Throws ConfigError for invalid input (including domain preconditions) and IoError for IO failures.
RunResult run(const ExperimentConfig& cfg);

struct CommandInfo {
    std::string name;
    std::string description;
};

const std::vector<CommandInfo>& list_commands();

struct CheckInfo {
    std::string name;
    std::string statement;  // the hypothesis or claim the checker evaluates
};

const std::vector<CheckInfo>& list_checks();

}  // namespace polybill
