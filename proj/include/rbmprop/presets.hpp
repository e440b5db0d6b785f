#pragma once

#include "rbmprop/config.hpp"
#include "rbmprop/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rbmprop {

// The 4x4 test-case parameter vector, +/-1 coding.
ThetaVector table1_theta();

// (name, literal value) pairs in published order, for exact echoing.
const std::vector<std::pair<std::string, std::string>>& table1_entries();

// built-in --preset configurations
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace rbmprop
