#include "rbmprop/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rbmprop::io {

std::string format_double(double value)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buffer, ptr);
}

std::string format_csv_row(const std::vector<std::string>& fields)
{
    std::string row;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ',';
        row += fields[i];
    }
    row += '\n';
    return row;
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data)
{
    std::string out = "obs_id";
    for (Index i = 1; i <= data.shape.n_visible; ++i) out += ",v" + std::to_string(i);
    out += '\n';
    for (Index r = 0; r < data.n; ++r) {
        out += std::to_string(r + 1);
        for (Index i = 0; i < data.shape.n_visible; ++i)
            out += ',' + std::to_string(static_cast<long long>(data.observations(r, i)));
        out += '\n';
    }
    write_text_file(path, out);
}

Dataset read_dataset_csv(const std::filesystem::path& path, const ModelShape& shape)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path.string());

    std::vector<VectorXd> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');  // obs_id
        VectorXd row(shape.n_visible);
        for (Index i = 0; i < shape.n_visible; ++i) {
            if (!std::getline(ss, field, ','))
                throw std::runtime_error("dataset row too short in " + path.string());
            row(i) = std::stod(field);
        }
        rows.push_back(std::move(row));
    }
    MatrixXd obs(static_cast<Index>(rows.size()), shape.n_visible);
    for (Index r = 0; r < obs.rows(); ++r) obs.row(r) = rows[r];
    return make_dataset(shape, std::move(obs));
}

ThetaVector read_theta_file(const std::filesystem::path& path, const ModelShape& shape)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open theta file: " + path.string());
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::stringstream ss(line);
        double value;
        while (ss >> value) values.push_back(value);
    }
    if (static_cast<Index>(values.size()) != shape.m())
        throw std::invalid_argument("theta file " + path.string() + " holds " +
                                    std::to_string(values.size()) + " values, expected " +
                                    std::to_string(shape.m()));
    VectorXd flat(shape.m());
    for (Index k = 0; k < shape.m(); ++k) flat(k) = values[k];
    return ThetaVector::from_flat(shape, flat);
}

void write_theta_file(const std::filesystem::path& path, const ThetaVector& theta)
{
    std::string out = "# theta, canonical order: visible mains, hidden mains, interactions row-major\n";
    const VectorXd flat = theta.flat();
    for (Index k = 0; k < flat.size(); ++k) out += format_double(flat(k)) + '\n';
    write_text_file(path, out);
}

std::string timestamp_utc()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buffer[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest)
{
    nlohmann::json j;
    j["command"] = manifest.command;
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [key, value] : manifest.config) config[key] = value;
    j["config"] = config;
    j["master_seed"] = manifest.master_seed;
    j["version"] = manifest.version;
    j["started_at"] = manifest.started_at;
    j["finished_at"] = manifest.finished_at;
    j["outputs"] = nlohmann::json::array();
    for (const auto& entry : manifest.outputs)
        j["outputs"].push_back({{"path", entry.path}, {"bytes", entry.bytes}, {"fnv1a64", entry.digest}});

    const auto tmp = out_dir / "manifest.json.tmp";
    const auto final_path = out_dir / "manifest.json";
    write_text_file(tmp, j.dump(2) + "\n");
    std::filesystem::rename(tmp, final_path);
}

}  // namespace rbmprop::io
