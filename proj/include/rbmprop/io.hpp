#pragma once

#include "rbmprop/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rbmprop::io {

// shortest representation that round-trips exactly
std::string format_double(double value);

std::string format_csv_row(const std::vector<std::string>& fields);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// FNV-1a over the file bytes; cheap content fingerprint for the run manifest.
std::uint64_t fnv1a64(const std::string& bytes);

// Dataset CSV: header obs_id,v1..vN with coded integer values.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(const std::filesystem::path& path, const ModelShape& shape);

// theta file: one value per line, canonical order, '#' comments allowed
ThetaVector read_theta_file(const std::filesystem::path& path, const ModelShape& shape);
void write_theta_file(const std::filesystem::path& path, const ThetaVector& theta);

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::uint64_t bytes = 0;
    std::string digest;  // fnv1a64 hex
};

struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  // resolved key = value pairs
    std::uint64_t master_seed = 0;
    std::string version;
    std::string started_at;
    std::string finished_at;
    std::vector<ManifestEntry> outputs;
};

// Records every emitted file with its digest; written last, via temp + rename.
void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest);

std::string timestamp_utc();

}  // namespace rbmprop::io
