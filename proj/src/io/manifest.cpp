#include "cavistim/io/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace cavistim::io {

std::map<std::string, double> parameter_map(const PhysParams& p)
{
    return {{"omega_a", p.omega_a}, {"omega_b", p.omega_b}, {"g_a", p.g_a},         {"g_b", p.g_b},
            {"g_donor", p.g_donor}, {"kappa", p.kappa},     {"gamma_a", p.gamma_a}, {"gamma_b", p.gamma_b}};
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path)
{
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["source"] = m.source;
    j["arguments"] = m.arguments;
    j["parameters"] = m.parameters;
    j["step_size"] = m.step_size;
    j["t_max"] = m.t_max;
    j["record_stride"] = m.record_stride;
    j["threads"] = m.threads;
    j["outputs"] = m.outputs;
    j["tool_version"] = m.tool_version;
    j["config_digest"] = m.config_digest;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace cavistim::io
