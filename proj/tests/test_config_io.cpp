#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rbmprop/commands.hpp"
#include "rbmprop/config.hpp"
#include "rbmprop/exact.hpp"
#include "rbmprop/io.hpp"
#include "rbmprop/presets.hpp"
#include "rbmprop/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace rbmprop;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() /
               ("rbmprop_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing")
{
    SUBCASE("values, comments and blank lines")
    {
        const auto config = ExperimentConfig::from_string(
            "# comment\n"
            "model.n_visible = 3\n"
            "\n"
            "model.coding = pm1  # trailing comment\n");
        CHECK(config.require_int("model.n_visible") == 3);
        CHECK(config.get_string("model.coding", "") == "pm1");
    }
    SUBCASE("unknown keys are rejected by name")
    {
        try {
            ExperimentConfig::from_string("model.n_visibles = 3\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("model.n_visibles") != std::string::npos);
        }
    }
    SUBCASE("malformed line rejected with location")
    {
        CHECK_THROWS_AS(ExperimentConfig::from_string("model.n_visible 3\n"), ConfigError);
    }
    SUBCASE("typed getters validate")
    {
        const auto config = ExperimentConfig::from_string("data.n = five\n");
        CHECK_THROWS_AS(config.require_int("data.n"), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig{}.require_string("data.n"), ConfigError);
    }
    SUBCASE("merge lets the override win")
    {
        auto base = ExperimentConfig::from_string("data.n = 10\nmodel.n_visible = 2\n");
        base.merge(ExperimentConfig::from_string("data.n = 20\n"));
        CHECK(base.require_int("data.n") == 20);
        CHECK(base.require_int("model.n_visible") == 2);
    }
    SUBCASE("resolved records the values actually used")
    {
        const auto config = ExperimentConfig::from_string("data.n = 10\n");
        config.require_int("data.n");
        config.get_double("diag.eps0", 0.05);
        const auto& resolved = config.resolved();
        bool saw_n = false, saw_eps = false;
        for (const auto& [key, value] : resolved) {
            if (key == "data.n") saw_n = value == "10";
            if (key == "diag.eps0") saw_eps = true;
        }
        CHECK(saw_n);
        CHECK(saw_eps);
    }
}

TEST_CASE("double formatting round-trips exactly")
{
    Rng rng(99);
    for (int rep = 0; rep < 2000; ++rep) {
        const double value = (rng.uniform() - 0.5) * std::pow(10.0, int(rng.below(20)) - 10);
        CHECK(std::stod(io::format_double(value)) == value);
    }
    CHECK(io::format_double(0.25) == "0.25");
    CHECK(io::format_double(1.0) == "1");
}

TEST_CASE("dataset csv round trip")
{
    TempDir dir;
    const ModelShape shape(3, 2, Coding::PlusMinusOne);
    ThetaVector theta(shape);
    theta.visible_main << 0.5, -0.2, 0.1;
    const Dataset data = sample_visibles_exact(theta, 200, 7);
    const fs::path file = dir.path / "data.csv";
    io::write_dataset_csv(file, data);
    const Dataset back = io::read_dataset_csv(file, shape);
    CHECK(back.n == data.n);
    CHECK((back.observations - data.observations).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.cell_counts - data.cell_counts).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("theta file io")
{
    TempDir dir;
    const ModelShape shape(2, 2, Coding::PlusMinusOne);
    const fs::path file = dir.path / "theta.txt";
    io::write_text_file(file, "0.1\n0.2\n-0.3\n0.4\n0.0\n0.0\n0.0\n0.0\n");
    const ThetaVector theta = io::read_theta_file(file, shape);
    CHECK(theta.visible_main(1) == 0.2);
    CHECK(theta.hidden_main(0) == -0.3);

    io::write_text_file(file, "0.1\n0.2\n");
    CHECK_THROWS_AS(io::read_theta_file(file, shape), std::invalid_argument);
}

TEST_CASE("cmd_diagnose presets")
{
    SUBCASE("zeros on the tiny shape")
    {
        TempDir dir;
        const auto result = cmd_diagnose(preset_config("zeros11"), dir.path, 1);
        const std::string csv = io::read_text_file(dir.path / "report.csv");
        // lrep and gap_max are exactly zero at theta = 0
        CHECK(csv.find(",0,0,0,0,0\n") != std::string::npos);
        CHECK(fs::exists(dir.path / "dist.csv"));
        CHECK(fs::exists(dir.path / "dist_header.json"));
    }
    SUBCASE("table 1 is not flagged near-degenerate")
    {
        TempDir dir;
        cmd_diagnose(preset_config("table1"), dir.path, 1);
        const std::string csv = io::read_text_file(dir.path / "report.csv");
        CHECK(csv.find("table1,4,4,pm1") != std::string::npos);
        // near_degenerate column is 0
        const auto line = csv.substr(csv.find("table1"));
        int commas = 0;
        size_t pos = 0;
        while (commas < 6) pos = line.find(',', pos) + 1, ++commas;
        CHECK(line[pos] == '0');
    }
    SUBCASE("wrong-dimension theta file is a config error naming the key")
    {
        TempDir dir;
        io::write_text_file(dir.path / "theta.txt", "1.0\n2.0\n");
        auto config = ExperimentConfig::from_string(
            "model.n_visible = 2\nmodel.n_hidden = 2\ntheta.source = file\n");
        config.set("theta.file", (dir.path / "theta.txt").string());
        try {
            cmd_diagnose(config, dir.path / "out", 1);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("theta.file") != std::string::npos);
        }
    }
}

TEST_CASE("cmd_simulate writes coded values and a validating manifest")
{
    TempDir dir;
    auto config = ExperimentConfig::from_string(
        "model.n_visible = 2\nmodel.n_hidden = 1\nmodel.coding = 01\n"
        "theta.source = zeros\ndata.n = 50\ndata.seed = 5\n");
    const auto result = cmd_simulate(config, dir.path, 1);

    const std::string csv = io::read_text_file(dir.path / "data.csv");
    CHECK(csv.rfind("obs_id,v1,v2\n", 0) == 0);
    CHECK(csv.find("-1") == std::string::npos);  // 01 coding emits 0/1 only

    // manifest digests match the emitted files
    const auto manifest = nlohmann::json::parse(io::read_text_file(dir.path / "manifest.json"));
    CHECK(manifest["command"] == "simulate");
    for (const auto& entry : manifest["outputs"]) {
        const std::string bytes = io::read_text_file(dir.path / entry["path"].get<std::string>());
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(io::fnv1a64(bytes)));
        CHECK(entry["fnv1a64"].get<std::string>() == hex);
        CHECK(entry["bytes"].get<std::uint64_t>() == bytes.size());
    }

    SUBCASE("n = 0 rejected")
    {
        auto bad = ExperimentConfig::from_string(
            "model.n_visible = 2\nmodel.n_hidden = 1\ntheta.source = zeros\ndata.n = 0\n");
        CHECK_THROWS_AS(cmd_simulate(bad, dir.path / "bad", 1), ConfigError);
    }
}

TEST_CASE("cmd_fit rejects unknown methods listing the valid ones")
{
    TempDir dir;
    auto config = preset_config("table1");
    config.set("fit.methods", "bwtqqq");
    try {
        cmd_fit(config, dir.path, 1);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("bwtqqq") != std::string::npos);
        CHECK(what.find("bwtplv") != std::string::npos);
        CHECK(what.find("bwtnlv") != std::string::npos);
        CHECK(what.find("bwtnml") != std::string::npos);
    }
}

TEST_CASE("small fit emits every table with consistent sizes")
{
    TempDir dir;
    auto config = ExperimentConfig::from_string(
        "model.n_visible = 2\nmodel.n_hidden = 2\ntheta.source = gridpoint\n"
        "theta.g_main = 0.4\ntheta.g_interaction = 0.2\ntheta.seed = 3\n"
        "data.n = 300\nfit.methods = bwtplv,bwtnlv,bwtnml\n"
        "fit.iterations = 160\nfit.burn_in = 30\nmcmc.max_lag = 10\n");
    const auto result = cmd_fit(config, dir.path, 7);

    for (const std::string name : {"chain_bwtplv.csv", "chain_bwtnlv.csv", "chain_bwtnml.csv",
                                   "ess.csv", "acf.csv", "posterior_cells.csv", "comparison.csv",
                                   "data.csv", "manifest.json"})
        CHECK(fs::exists(dir.path / name));

    // chain rows = iterations - burn_in; ess rows = 4 cells x 3 methods
    const std::string chain = io::read_text_file(dir.path / "chain_bwtnml.csv");
    CHECK(std::count(chain.begin(), chain.end(), '\n') == 131);
    const std::string ess = io::read_text_file(dir.path / "ess.csv");
    CHECK(std::count(ess.begin(), ess.end(), '\n') == 13);
    const std::string cells = io::read_text_file(dir.path / "posterior_cells.csv");
    CHECK(std::count(cells.begin(), cells.end(), '\n') == 13);
}

TEST_CASE("repro targets")
{
    SUBCASE("table1 echoes the published parameter literals")
    {
        TempDir dir;
        cmd_repro("table1", ExperimentConfig{}, dir.path, 1);
        const std::string csv = io::read_text_file(dir.path / "theta.csv");
        CHECK(csv.find("theta_v1,-1.104376\n") != std::string::npos);
        CHECK(csv.find("theta_44,0.0004767\n") != std::string::npos);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 25);
    }
    SUBCASE("unknown target rejected")
    {
        TempDir dir;
        CHECK_THROWS_AS(cmd_repro("table9", ExperimentConfig{}, dir.path, 1), ConfigError);
    }
}

TEST_CASE("grid presets")
{
    SUBCASE("paper preset spans 576 grid points per shape across sixteen shapes")
    {
        const auto config = preset_config("paper");
        const long long breaks = config.require_int("grid.breaks");
        CHECK(breaks * breaks == 576);
        CHECK(config.require_int("grid.replicates") == 100);
        const std::string shapes = config.require_string("grid.shapes");
        CHECK(std::count(shapes.begin(), shapes.end(), 'x') == 16);
    }
    SUBCASE("desk preset is the reduced design")
    {
        const auto config = preset_config("desk");
        CHECK(config.require_int("grid.breaks") == 8);
        CHECK(config.require_int("grid.replicates") == 25);
    }
    SUBCASE("unknown preset is a config error")
    {
        CHECK_THROWS_AS(preset_config("dsek"), ConfigError);
    }
}

TEST_CASE("reruns are byte-identical")
{
    TempDir dir;
    auto config = ExperimentConfig::from_string(
        "model.n_visible = 2\nmodel.n_hidden = 2\ntheta.source = zeros\ndata.n = 40\n");
    cmd_simulate(config, dir.path / "a", 9);
    cmd_simulate(config, dir.path / "b", 9);
    CHECK(io::read_text_file(dir.path / "a" / "data.csv") ==
          io::read_text_file(dir.path / "b" / "data.csv"));
}
