#include "rbmprop/presets.hpp"

#include <stdexcept>

namespace rbmprop {

const std::vector<std::pair<std::string, std::string>>& table1_entries()
{
    static const std::vector<std::pair<std::string, std::string>> entries = {
        {"theta_v1", "-1.104376"},  {"theta_v2", "-0.2630044"}, {"theta_v3", "0.3411915"},
        {"theta_v4", "-0.2583769"}, {"theta_h1", "-0.1939302"}, {"theta_h2", "-0.0572858"},
        {"theta_h3", "-0.2101802"}, {"theta_h4", "0.2402456"},  {"theta_11", "-0.0006334"},
        {"theta_12", "-0.0021401"}, {"theta_13", "0.0047799"},  {"theta_14", "0.0025282"},
        {"theta_21", "0.0012975"},  {"theta_22", "0.0000253"},  {"theta_23", "-0.0004352"},
        {"theta_24", "-0.0086621"}, {"theta_31", "-0.0038301"}, {"theta_32", "0.0032237"},
        {"theta_33", "0.0020681"},  {"theta_34", "0.0041429"},  {"theta_41", "0.0089533"},
        {"theta_42", "-0.0042403"}, {"theta_43", "-0.000048"},  {"theta_44", "0.0004767"},
    };
    return entries;
}

ThetaVector table1_theta()
{
    const ModelShape shape(4, 4, Coding::PlusMinusOne);
    VectorXd flat(shape.m());
    const auto& entries = table1_entries();
    for (Index k = 0; k < shape.m(); ++k) flat(k) = std::stod(entries[k].second);
    return ThetaVector::from_flat(shape, flat);
}

namespace {

// prior.c tuned on the 4x4 test case (total-variation scan over C); fit.hits
// raised so the marginalized chain decorrelates within a few sweeps.
constexpr const char* kTable1Preset = R"(
model.n_visible = 4
model.n_hidden = 4
model.coding = pm1
theta.source = table1
data.n = 5000
prior.c = 5.8
fit.hits = 10
)";

constexpr const char* kZeros11Preset = R"(
model.n_visible = 1
model.n_hidden = 1
model.coding = pm1
theta.source = zeros
)";

constexpr const char* kDeskPreset = R"(
grid.shapes = 1x1,2x2,4x4
grid.mag_min = 0.001
grid.mag_max = 3
grid.breaks = 8
grid.replicates = 25
)";

constexpr const char* kPaperPreset = R"(
grid.shapes = 1x1,1x2,1x3,1x4,2x1,2x2,2x3,2x4,3x1,3x2,3x3,3x4,4x1,4x2,4x3,4x4
grid.mag_min = 0.001
grid.mag_max = 3
grid.breaks = 24
grid.replicates = 100
)";

}  // namespace

std::vector<std::string> preset_names()
{
    return {"table1", "zeros11", "desk", "paper"};
}

ExperimentConfig preset_config(const std::string& name)
{
    if (name == "table1") return ExperimentConfig::from_string(kTable1Preset, "<preset table1>");
    if (name == "zeros11") return ExperimentConfig::from_string(kZeros11Preset, "<preset zeros11>");
    if (name == "desk") return ExperimentConfig::from_string(kDeskPreset, "<preset desk>");
    if (name == "paper") return ExperimentConfig::from_string(kPaperPreset, "<preset paper>");
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (available: " + known + ")");
}

}  // namespace rbmprop
