#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cavistim/model.hpp"

namespace cavistim::io {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string command;
    /// Config file path, or builder name.
    std::string source;
    std::map<std::string, std::string> arguments;
    /// Resolved physical parameters (builder runs only).
    std::map<std::string, double> parameters;
    double step_size = 0.0;
    double t_max = 0.0;
    int record_stride = 0;
    int threads = 1;
    std::vector<std::string> outputs;
    std::string tool_version = kToolVersion;
    std::string config_digest;
};

std::map<std::string, double> parameter_map(const PhysParams& p);

void write_manifest(const RunManifest& m, const std::filesystem::path& path);

}  // namespace cavistim::io
