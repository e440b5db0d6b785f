#include "rbmprop/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rbmprop {

namespace {

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::known_keys()
{
    static const std::vector<std::string> keys = {
        "run.seed",
        "model.n_visible", "model.n_hidden", "model.coding", "model.cap",
        "theta.source", "theta.file", "theta.g_main", "theta.g_interaction", "theta.seed",
        "data.n", "data.seed", "data.file",
        "fit.methods", "fit.iterations", "fit.burn_in", "fit.target_acceptance",
        "fit.adaptation_decay", "fit.initial_scale", "fit.hits", "fit.proposal",
        "fit.init", "fit.seed",
        "prior.c", "prior.sigma_main_sq", "prior.sigma_int_sq", "prior.trunc_mult",
        "diag.directions", "diag.axis", "diag.seed", "diag.eps0", "diag.eps_modal",
        "grid.mag_min", "grid.mag_max", "grid.breaks", "grid.replicates",
        "grid.shapes", "grid.spacing", "grid.threads", "grid.seed",
        "mcmc.block_len", "mcmc.max_lag",
    };
    return keys;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path.string());
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text, const std::string& origin)
{
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected `section.key = value`");
        config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

void ExperimentConfig::set(const std::string& key, const std::string& value)
{
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ConfigError("unknown configuration key '" + key + "'");
    if (value.empty()) throw ConfigError("empty value for configuration key '" + key + "'");
    values_[key] = value;
}

void ExperimentConfig::merge(const ExperimentConfig& overrides)
{
    for (const auto& [key, value] : overrides.values_) values_[key] = value;
}

bool ExperimentConfig::has(const std::string& key) const
{
    return values_.count(key) != 0;
}

std::string ExperimentConfig::lookup(const std::string& key) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? std::string{} : it->second;
}

void ExperimentConfig::note(const std::string& key, const std::string& value) const
{
    for (auto& [k, v] : resolved_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    resolved_.emplace_back(key, value);
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const
{
    const std::string value = has(key) ? lookup(key) : fallback;
    note(key, value);
    return value;
}

std::string ExperimentConfig::require_string(const std::string& key) const
{
    if (!has(key)) throw ConfigError("missing required configuration key '" + key + "'");
    const std::string value = lookup(key);
    note(key, value);
    return value;
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const
{
    if (!has(key)) {
        note(key, std::to_string(fallback));
        return fallback;
    }
    return require_int(key);
}

long long ExperimentConfig::require_int(const std::string& key) const
{
    const std::string raw = require_string(key);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size())
        throw ConfigError("configuration key '" + key + "' expects an integer, got '" + raw + "'");
    return value;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t fallback) const
{
    if (!has(key)) {
        note(key, std::to_string(fallback));
        return fallback;
    }
    const std::string raw = require_string(key);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size())
        throw ConfigError("configuration key '" + key + "' expects an unsigned integer, got '" + raw + "'");
    return value;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const
{
    if (!has(key)) {
        std::ostringstream ss;
        ss << fallback;
        note(key, ss.str());
        return fallback;
    }
    return require_double(key);
}

double ExperimentConfig::require_double(const std::string& key) const
{
    const std::string raw = require_string(key);
    try {
        size_t consumed = 0;
        const double value = std::stod(raw, &consumed);
        if (consumed != raw.size()) throw std::invalid_argument(raw);
        return value;
    } catch (const std::exception&) {
        throw ConfigError("configuration key '" + key + "' expects a number, got '" + raw + "'");
    }
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const
{
    if (!has(key)) {
        note(key, fallback ? "1" : "0");
        return fallback;
    }
    const std::string raw = require_string(key);
    if (raw == "1" || raw == "true" || raw == "on") return true;
    if (raw == "0" || raw == "false" || raw == "off") return false;
    throw ConfigError("configuration key '" + key + "' expects a boolean, got '" + raw + "'");
}

}  // namespace rbmprop
