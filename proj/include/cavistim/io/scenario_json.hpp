#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavistim/model.hpp"

namespace cavistim::io {

/// Malformed or unreadable scenario file. what() names the source.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, std::vector<std::string> problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

// JSON mirrors ScenarioConfig field for field:
//   { "cavities": [ { "modes": [{"mode_id", "frequency"}],
//                     "atoms": [{"level_energies", "level_names"?, "initial_level",
//                                "transitions": [{"upper_level", "lower_level", "mode_id", "coupling"}]}],
//                     "initial_photons": {"<mode_id>": n} } ],
//     "links": [{"cavity_a", "cavity_b", "mode_id", "strength"}],
//     "leaks": [{"cavity", "mode_id", "rate", "sink_label"}],
//     "step_size", "t_max", "record_stride" }
// Unknown keys are errors; "level_names", "initial_photons", "links" and
// "leaks" may be omitted.

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg);

ScenarioConfig scenario_from_json(const nlohmann::json& j, const std::string& source = "<json>");

ScenarioConfig read_scenario(const std::filesystem::path& path);

void write_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

}  // namespace cavistim::io
