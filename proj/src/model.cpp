#include "cavistim/model.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

namespace cavistim {

std::string AtomSpec::level_name(int level) const
{
    if (level >= 0 && static_cast<std::size_t>(level) < level_names.size()) {
        return level_names[level];
    }
    return std::to_string(level);
}

const ModeSpec* CavitySpec::find_mode(const std::string& id) const
{
    for (const auto& m : modes) {
        if (m.mode_id == id) return &m;
    }
    return nullptr;
}

namespace {

std::string join_violations(const std::vector<std::string>& v)
{
    std::ostringstream os;
    os << "invalid scenario (" << v.size() << " violation" << (v.size() == 1 ? "" : "s") << ")";
    for (const auto& s : v) os << "\n  - " << s;
    return os.str();
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations))
{
}

std::vector<std::string> scenario_violations(const ScenarioConfig& cfg)
{
    std::vector<std::string> out;
    auto bad = [&out](const std::string& where, const std::string& what) { out.push_back(where + ": " + what); };

    if (cfg.cavities.empty()) out.emplace_back("no cavities");

    const int ncav = static_cast<int>(cfg.cavities.size());
    for (int c = 0; c < ncav; ++c) {
        const auto& cav = cfg.cavities[c];
        const std::string where = "cavity " + std::to_string(c);
        std::set<std::string> ids;
        for (const auto& m : cav.modes) {
            if (m.mode_id.empty()) bad(where, "mode with empty id");
            if (!ids.insert(m.mode_id).second) bad(where, "duplicate mode id '" + m.mode_id + "'");
            if (!(std::isfinite(m.frequency) && m.frequency > 0.0)) {
                bad(where, "mode '" + m.mode_id + "' frequency must be > 0");
            }
        }
        for (const auto& [id, n] : cav.initial_photons) {
            if (!cav.find_mode(id)) bad(where, "initial photons for unknown mode '" + id + "'");
            if (n < 0) bad(where, "negative initial occupation of mode '" + id + "'");
        }
        for (std::size_t a = 0; a < cav.atoms.size(); ++a) {
            const auto& atom = cav.atoms[a];
            const std::string aw = where + " atom " + std::to_string(a);
            const int nlev = static_cast<int>(atom.level_energies.size());
            if (nlev < 2) bad(aw, "needs at least 2 levels");
            for (double e : atom.level_energies) {
                if (!std::isfinite(e)) bad(aw, "non-finite level energy");
            }
            if (!atom.level_names.empty() && static_cast<int>(atom.level_names.size()) != nlev) {
                bad(aw, "level_names size does not match level count");
            }
            if (atom.initial_level < 0 || atom.initial_level >= nlev) bad(aw, "initial_level out of range");
            std::set<std::tuple<int, int, std::string>> seen;
            for (const auto& t : atom.transitions) {
                const std::string tw = aw + " transition " + std::to_string(t.upper_level) + "->" +
                                       std::to_string(t.lower_level) + " on '" + t.mode_id + "'";
                if (t.upper_level == t.lower_level) bad(tw, "upper and lower level coincide");
                if (t.upper_level < 0 || t.upper_level >= nlev || t.lower_level < 0 || t.lower_level >= nlev) {
                    bad(tw, "level index out of range");
                }
                if (!finite_nonneg(t.coupling)) bad(tw, "coupling must be >= 0");
                if (!cav.find_mode(t.mode_id)) bad(tw, "mode not present in host cavity");
                if (!seen.emplace(t.upper_level, t.lower_level, t.mode_id).second) bad(tw, "duplicate transition");
            }
        }
    }

    for (std::size_t i = 0; i < cfg.links.size(); ++i) {
        const auto& l = cfg.links[i];
        const std::string where = "link " + std::to_string(i) + " (" + std::to_string(l.cavity_a) + "<->" +
                                  std::to_string(l.cavity_b) + ", '" + l.mode_id + "')";
        if (!finite_nonneg(l.strength)) bad(where, "strength must be >= 0");
        if (l.cavity_a == l.cavity_b) bad(where, "links a cavity to itself");
        const bool a_ok = l.cavity_a >= 0 && l.cavity_a < ncav;
        const bool b_ok = l.cavity_b >= 0 && l.cavity_b < ncav;
        if (!a_ok) bad(where, "cavity_a out of range");
        if (!b_ok) bad(where, "cavity_b out of range");
        const ModeSpec* ma = a_ok ? cfg.cavities[l.cavity_a].find_mode(l.mode_id) : nullptr;
        const ModeSpec* mb = b_ok ? cfg.cavities[l.cavity_b].find_mode(l.mode_id) : nullptr;
        if (a_ok && !ma) bad(where, "mode absent in cavity_a");
        if (b_ok && !mb) bad(where, "mode absent in cavity_b");
        if (ma && mb && ma->frequency != mb->frequency) bad(where, "mode frequency differs between cavities");
    }

    for (std::size_t i = 0; i < cfg.leaks.size(); ++i) {
        const auto& k = cfg.leaks[i];
        const std::string where = "leak " + std::to_string(i) + " ('" + k.sink_label + "')";
        if (!finite_nonneg(k.rate)) bad(where, "rate must be >= 0");
        if (k.sink_label.empty()) bad(where, "empty sink label");
        if (k.cavity < 0 || k.cavity >= ncav) {
            bad(where, "cavity out of range");
        } else if (!cfg.cavities[k.cavity].find_mode(k.mode_id)) {
            bad(where, "mode '" + k.mode_id + "' absent in cavity " + std::to_string(k.cavity));
        }
    }

    if (!(std::isfinite(cfg.step_size) && cfg.step_size > 0.0)) out.emplace_back("step_size must be > 0");
    if (!(std::isfinite(cfg.t_max) && cfg.t_max > 0.0)) out.emplace_back("t_max must be > 0");
    if (cfg.record_stride < 1) out.emplace_back("record_stride must be >= 1");
    return out;
}

ValidatedScenario validate_scenario(ScenarioConfig cfg)
{
    auto v = scenario_violations(cfg);
    if (!v.empty()) throw ValidationError(std::move(v));
    return ValidatedScenario(std::move(cfg));
}

namespace {

void apply(ScenarioConfig& cfg, const IntegrationParams& integ)
{
    cfg.step_size = integ.step_size;
    cfg.t_max = integ.t_max;
    cfg.record_stride = integ.record_stride;
}

AtomSpec target_atom(const PhysParams& p)
{
    AtomSpec a;
    a.level_energies = {p.omega_a, 0.0, p.omega_a - p.omega_b};
    a.level_names = {"S", "A", "B"};
    a.transitions = {{level::S, level::A, "A", p.g_a}, {level::S, level::B, "B", p.g_b}};
    a.initial_level = level::S;
    return a;
}

CavitySpec target_cavity(int n_atoms, const PhysParams& p)
{
    CavitySpec c;
    c.modes = {{"A", p.omega_a}, {"B", p.omega_b}};
    c.atoms.assign(n_atoms, target_atom(p));
    c.initial_photons = {{"A", 0}, {"B", 0}};
    return c;
}

std::vector<LeakageChannel> target_leaks(const PhysParams& p)
{
    return {{0, "A", p.gamma_a, "sinkA"}, {0, "B", p.gamma_b, "sinkB"}};
}

void require(bool ok, const char* what)
{
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

ScenarioConfig build_jc_scenario(double g, int n_photons, double mode_freq, const IntegrationParams& integ)
{
    require(n_photons >= 0, "photon count must be >= 0");
    ScenarioConfig cfg;
    CavitySpec cav;
    cav.modes = {{"A", mode_freq}};
    cav.atoms = {{{mode_freq, 0.0}, {"e", "g"}, {{0, 1, "A", g}}, 0}};
    cav.initial_photons = {{"A", n_photons}};
    cfg.cavities.push_back(std::move(cav));
    apply(cfg, integ);
    return cfg;
}

ScenarioConfig build_star_scenario(int n_donors, double kappa, double mode_freq, const IntegrationParams& integ)
{
    require(n_donors >= 1, "star scenario needs at least one donor cavity");
    ScenarioConfig cfg;
    for (int c = 0; c <= n_donors; ++c) {
        CavitySpec cav;
        cav.modes = {{"A", mode_freq}};
        cav.initial_photons = {{"A", c == 0 ? 0 : 1}};
        cfg.cavities.push_back(std::move(cav));
        if (c > 0) cfg.links.push_back({0, c, "A", kappa});
    }
    apply(cfg, integ);
    return cfg;
}

ScenarioConfig build_baseline(int n_atoms, const PhysParams& p, const IntegrationParams& integ)
{
    require(n_atoms >= 1, "baseline needs at least one target atom");
    ScenarioConfig cfg;
    cfg.cavities.push_back(target_cavity(n_atoms, p));
    cfg.leaks = target_leaks(p);
    apply(cfg, integ);
    return cfg;
}

ScenarioConfig build_config1(int n_atoms, int m_photons, const PhysParams& p, const IntegrationParams& integ)
{
    require(n_atoms >= 1, "config1 needs at least one target atom");
    require(m_photons >= 0, "config1 photon count must be >= 0");
    ScenarioConfig cfg = build_baseline(n_atoms, p, integ);
    CavitySpec donor;
    donor.modes = {{"A", p.omega_a}};
    donor.initial_photons = {{"A", m_photons}};
    cfg.cavities.push_back(std::move(donor));
    cfg.links = {{0, 1, "A", p.kappa}};
    return cfg;
}

ScenarioConfig build_config2(int n_atoms, int m_donor_atoms, const PhysParams& p, const IntegrationParams& integ)
{
    require(n_atoms >= 1, "config2 needs at least one target atom");
    require(m_donor_atoms >= 1, "config2 needs at least one donor atom");
    ScenarioConfig cfg = build_baseline(n_atoms, p, integ);
    AtomSpec d;
    d.level_energies = {p.omega_a, 0.0};
    d.level_names = {"S", "A"};
    d.transitions = {{0, 1, "A", p.g_donor}};
    d.initial_level = 0;
    CavitySpec donor;
    donor.modes = {{"A", p.omega_a}};
    donor.atoms.assign(m_donor_atoms, d);
    donor.initial_photons = {{"A", 0}};
    cfg.cavities.push_back(std::move(donor));
    cfg.links = {{0, 1, "A", p.kappa}};
    return cfg;
}

std::string scenario_digest(const ScenarioConfig& cfg)
{
    std::ostringstream os;
    os.precision(17);
    for (const auto& cav : cfg.cavities) {
        os << "C";
        for (const auto& m : cav.modes) os << "m" << m.mode_id << ':' << m.frequency << ';';
        for (const auto& [id, n] : cav.initial_photons) os << "p" << id << ':' << n << ';';
        for (const auto& a : cav.atoms) {
            os << "a" << a.initial_level;
            for (double e : a.level_energies) os << 'e' << e;
            for (const auto& n : a.level_names) os << 'n' << n << ';';
            for (const auto& t : a.transitions) {
                os << 't' << t.upper_level << ',' << t.lower_level << ',' << t.mode_id << ',' << t.coupling << ';';
            }
        }
    }
    for (const auto& l : cfg.links) os << "L" << l.cavity_a << ',' << l.cavity_b << ',' << l.mode_id << ',' << l.strength;
    for (const auto& k : cfg.leaks) os << "K" << k.cavity << ',' << k.mode_id << ',' << k.rate << ',' << k.sink_label;
    os << "h" << cfg.step_size << "T" << cfg.t_max << "s" << cfg.record_stride;

    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : os.str()) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

ScenarioConfig retune_mode(ScenarioConfig cfg, int cavity, const std::string& mode_id, double frequency,
                           double coupling_exponent)
{
    require(cavity >= 0 && cavity < static_cast<int>(cfg.cavities.size()), "retune_mode: cavity out of range");
    require(frequency > 0.0, "retune_mode: frequency must be > 0");

    // Cavities sharing the mode through links must stay degenerate.
    std::set<int> group{cavity};
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& l : cfg.links) {
            if (l.mode_id != mode_id) continue;
            if (group.count(l.cavity_a) && group.insert(l.cavity_b).second) grew = true;
            if (group.count(l.cavity_b) && group.insert(l.cavity_a).second) grew = true;
        }
    }

    for (int c : group) {
        auto& cav = cfg.cavities.at(c);
        double old = 0.0;
        for (auto& m : cav.modes) {
            if (m.mode_id == mode_id) {
                old = m.frequency;
                m.frequency = frequency;
            }
        }
        require(old > 0.0, "retune_mode: mode not present");
        const double scale = std::pow(frequency / old, coupling_exponent);
        for (auto& atom : cav.atoms) {
            for (auto& t : atom.transitions) {
                if (t.mode_id != mode_id) continue;
                atom.level_energies.at(t.lower_level) = atom.level_energies.at(t.upper_level) - frequency;
                t.coupling *= scale;
            }
        }
    }
    return cfg;
}

}  // namespace cavistim
