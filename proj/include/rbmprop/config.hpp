#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbmprop {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-oriented text configuration: one `section.key = value` per line,
// '#' starts a comment. Unknown keys are rejected at parse time. Every
// getter records the value it handed out (explicit or default), so commands
// can write the fully resolved configuration into the run manifest.
class ExperimentConfig {
public:
    ExperimentConfig() = default;

    static ExperimentConfig from_file(const std::filesystem::path& path);
    static ExperimentConfig from_string(const std::string& text, const std::string& origin = "<string>");

    // later sources win; used to layer preset < file < CLI
    void merge(const ExperimentConfig& overrides);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    long long require_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // every key touched by a getter, with the value actually used
    const std::vector<std::pair<std::string, std::string>>& resolved() const { return resolved_; }

    static const std::vector<std::string>& known_keys();

private:
    std::string lookup(const std::string& key) const;
    void note(const std::string& key, const std::string& value) const;

    std::map<std::string, std::string> values_;
    mutable std::vector<std::pair<std::string, std::string>> resolved_;
};

}  // namespace rbmprop
