#pragma once

#include "rbmprop/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rbmprop {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct CommandResult {
    std::filesystem::path out_dir;
    std::vector<std::string> files;  // relative names, manifest.json last
};

// All commands are deterministic: (config, master_seed) fixes every output byte.
CommandResult cmd_diagnose(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                           std::uint64_t master_seed);
CommandResult cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                           std::uint64_t master_seed);
CommandResult cmd_grid(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                       std::uint64_t master_seed);
CommandResult cmd_fit(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                      std::uint64_t master_seed);

// Canned reproductions: table1, table3, fig12, fig13, fig8to11.
CommandResult cmd_repro(const std::string& target, const ExperimentConfig& config,
                        const std::filesystem::path& out_dir, std::uint64_t master_seed);

}  // namespace rbmprop
