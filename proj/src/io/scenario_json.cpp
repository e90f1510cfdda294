#include "cavistim/io/scenario_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace cavistim::io {

namespace {

std::string describe(const std::string& source, const std::vector<std::string>& problems)
{
    std::ostringstream os;
    os << source << ": invalid scenario file";
    for (const auto& p : problems) os << "\n  - " << p;
    return os.str();
}

using json = nlohmann::json;

// Collects problems while walking the document so that a single read reports all of them.
class Reader {
public:
    std::vector<std::string> problems;

    void keys(const json& obj, const std::string& where, std::initializer_list<const char*> required,
              std::initializer_list<const char*> optional = {})
    {
        if (!obj.is_object()) {
            problems.push_back(where + ": expected an object");
            return;
        }
        std::set<std::string> allowed;
        for (const char* k : required) {
            allowed.insert(k);
            if (!obj.contains(k)) problems.push_back(where + ": missing key '" + k + "'");
        }
        for (const char* k : optional) allowed.insert(k);
        for (const auto& [k, v] : obj.items()) {
            if (!allowed.count(k)) problems.push_back(where + ": unknown key '" + k + "'");
        }
    }

    template <class T>
    T get(const json& obj, const char* key, const std::string& where, T fallback = {})
    {
        if (!obj.is_object() || !obj.contains(key)) return fallback;
        try {
            return obj.at(key).get<T>();
        } catch (const json::exception&) {
            problems.push_back(where + "." + key + ": wrong type");
            return fallback;
        }
    }

    const json& array(const json& obj, const char* key, const std::string& where)
    {
        static const json empty = json::array();
        if (!obj.is_object() || !obj.contains(key)) return empty;
        const json& v = obj.at(key);
        if (!v.is_array()) {
            problems.push_back(where + "." + key + ": expected an array");
            return empty;
        }
        return v;
    }
};

}  // namespace

ConfigError::ConfigError(const std::string& source, std::vector<std::string> problems)
    : std::runtime_error(describe(source, problems)), problems_(std::move(problems))
{
}

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg)
{
    nlohmann::ordered_json j;
    j["cavities"] = nlohmann::ordered_json::array();
    for (const auto& cav : cfg.cavities) {
        nlohmann::ordered_json c;
        c["modes"] = nlohmann::ordered_json::array();
        for (const auto& m : cav.modes) c["modes"].push_back({{"mode_id", m.mode_id}, {"frequency", m.frequency}});
        c["atoms"] = nlohmann::ordered_json::array();
        for (const auto& a : cav.atoms) {
            nlohmann::ordered_json aj;
            aj["level_energies"] = a.level_energies;
            if (!a.level_names.empty()) aj["level_names"] = a.level_names;
            aj["initial_level"] = a.initial_level;
            aj["transitions"] = nlohmann::ordered_json::array();
            for (const auto& t : a.transitions) {
                aj["transitions"].push_back({{"upper_level", t.upper_level},
                                             {"lower_level", t.lower_level},
                                             {"mode_id", t.mode_id},
                                             {"coupling", t.coupling}});
            }
            c["atoms"].push_back(std::move(aj));
        }
        c["initial_photons"] = nlohmann::ordered_json::object();
        for (const auto& [id, n] : cav.initial_photons) c["initial_photons"][id] = n;
        j["cavities"].push_back(std::move(c));
    }
    j["links"] = nlohmann::ordered_json::array();
    for (const auto& l : cfg.links) {
        j["links"].push_back(
            {{"cavity_a", l.cavity_a}, {"cavity_b", l.cavity_b}, {"mode_id", l.mode_id}, {"strength", l.strength}});
    }
    j["leaks"] = nlohmann::ordered_json::array();
    for (const auto& k : cfg.leaks) {
        j["leaks"].push_back(
            {{"cavity", k.cavity}, {"mode_id", k.mode_id}, {"rate", k.rate}, {"sink_label", k.sink_label}});
    }
    j["step_size"] = cfg.step_size;
    j["t_max"] = cfg.t_max;
    j["record_stride"] = cfg.record_stride;
    return j;
}

ScenarioConfig scenario_from_json(const json& j, const std::string& source)
{
    Reader r;
    ScenarioConfig cfg;
    r.keys(j, "scenario", {"cavities", "step_size", "t_max", "record_stride"}, {"links", "leaks"});
    if (!r.problems.empty() && !j.is_object()) throw ConfigError(source, r.problems);

    const auto& cavs = r.array(j, "cavities", "scenario");
    for (std::size_t c = 0; c < cavs.size(); ++c) {
        const std::string cw = "cavities[" + std::to_string(c) + "]";
        const json& cj = cavs[c];
        r.keys(cj, cw, {"modes"}, {"atoms", "initial_photons"});
        CavitySpec cav;
        const auto& modes = r.array(cj, "modes", cw);
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const std::string mw = cw + ".modes[" + std::to_string(m) + "]";
            r.keys(modes[m], mw, {"mode_id", "frequency"});
            cav.modes.push_back({r.get<std::string>(modes[m], "mode_id", mw), r.get<double>(modes[m], "frequency", mw)});
        }
        const auto& atoms = r.array(cj, "atoms", cw);
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            const std::string aw = cw + ".atoms[" + std::to_string(a) + "]";
            const json& aj = atoms[a];
            r.keys(aj, aw, {"level_energies", "initial_level", "transitions"}, {"level_names"});
            AtomSpec atom;
            atom.level_energies = r.get<std::vector<double>>(aj, "level_energies", aw);
            atom.level_names = r.get<std::vector<std::string>>(aj, "level_names", aw);
            atom.initial_level = r.get<int>(aj, "initial_level", aw);
            const auto& trs = r.array(aj, "transitions", aw);
            for (std::size_t t = 0; t < trs.size(); ++t) {
                const std::string tw = aw + ".transitions[" + std::to_string(t) + "]";
                r.keys(trs[t], tw, {"upper_level", "lower_level", "mode_id", "coupling"});
                atom.transitions.push_back({r.get<int>(trs[t], "upper_level", tw), r.get<int>(trs[t], "lower_level", tw),
                                            r.get<std::string>(trs[t], "mode_id", tw),
                                            r.get<double>(trs[t], "coupling", tw)});
            }
            cav.atoms.push_back(std::move(atom));
        }
        cav.initial_photons = r.get<std::map<std::string, int>>(cj, "initial_photons", cw);
        cfg.cavities.push_back(std::move(cav));
    }

    const auto& links = r.array(j, "links", "scenario");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string lw = "links[" + std::to_string(i) + "]";
        r.keys(links[i], lw, {"cavity_a", "cavity_b", "mode_id", "strength"});
        cfg.links.push_back({r.get<int>(links[i], "cavity_a", lw), r.get<int>(links[i], "cavity_b", lw),
                             r.get<std::string>(links[i], "mode_id", lw), r.get<double>(links[i], "strength", lw)});
    }
    const auto& leaks = r.array(j, "leaks", "scenario");
    for (std::size_t i = 0; i < leaks.size(); ++i) {
        const std::string kw = "leaks[" + std::to_string(i) + "]";
        r.keys(leaks[i], kw, {"cavity", "mode_id", "rate", "sink_label"});
        cfg.leaks.push_back({r.get<int>(leaks[i], "cavity", kw), r.get<std::string>(leaks[i], "mode_id", kw),
                             r.get<double>(leaks[i], "rate", kw), r.get<std::string>(leaks[i], "sink_label", kw)});
    }
    cfg.step_size = r.get<double>(j, "step_size", "scenario", cfg.step_size);
    cfg.t_max = r.get<double>(j, "t_max", "scenario", cfg.t_max);
    cfg.record_stride = r.get<int>(j, "record_stride", "scenario", cfg.record_stride);

    if (!r.problems.empty()) throw ConfigError(source, std::move(r.problems));
    return cfg;
}

ScenarioConfig read_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), {"cannot open file"});
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), {std::string("JSON parse error: ") + e.what()});
    }
    return scenario_from_json(j, path.string());
}

void write_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << scenario_to_json(cfg).dump(2) << '\n';
}

}  // namespace cavistim::io
