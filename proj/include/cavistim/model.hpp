#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavistim {

// Scenario description for a Tavis-Cummings-Hubbard network: cavities holding
// modes and multilevel atoms, waveguide links between cavities, and photon
// leakage channels into named sinks. Energies and rates use hbar = 1.

struct ModeSpec {
    std::string mode_id;
    double frequency = 1.0;

    bool operator==(const ModeSpec&) const = default;
};

struct TransitionSpec {
    int upper_level = 0;
    int lower_level = 1;
    std::string mode_id;
    double coupling = 0.0;

    bool operator==(const TransitionSpec&) const = default;
};

struct AtomSpec {
    std::vector<double> level_energies;
    /// Optional display names, one per level; empty means "use the index".
    std::vector<std::string> level_names;
    std::vector<TransitionSpec> transitions;
    int initial_level = 0;

    std::string level_name(int level) const;

    bool operator==(const AtomSpec&) const = default;
};

struct CavitySpec {
    std::vector<ModeSpec> modes;
    std::vector<AtomSpec> atoms;
    std::map<std::string, int> initial_photons;

    const ModeSpec* find_mode(const std::string& id) const;

    bool operator==(const CavitySpec&) const = default;
};

struct WaveguideLink {
    int cavity_a = 0;
    int cavity_b = 1;
    std::string mode_id;
    double strength = 0.0;

    bool operator==(const WaveguideLink&) const = default;
};

struct LeakageChannel {
    int cavity = 0;
    std::string mode_id;
    double rate = 0.0;
    std::string sink_label;

    bool operator==(const LeakageChannel&) const = default;
};

struct ScenarioConfig {
    std::vector<CavitySpec> cavities;
    std::vector<WaveguideLink> links;
    std::vector<LeakageChannel> leaks;
    double step_size = 1e-2;
    double t_max = 100.0;
    int record_stride = 10;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Thrown by validate_scenario; carries every violation found, not just the first.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// A ScenarioConfig that passed validation. Only validate_scenario creates one.
class ValidatedScenario {
public:
    const ScenarioConfig& config() const noexcept { return config_; }
    const ScenarioConfig* operator->() const noexcept { return &config_; }

private:
    explicit ValidatedScenario(ScenarioConfig cfg) : config_(std::move(cfg)) {}
    friend ValidatedScenario validate_scenario(ScenarioConfig cfg);

    ScenarioConfig config_;
};

ValidatedScenario validate_scenario(ScenarioConfig cfg);

/// Returns all violations without throwing.
std::vector<std::string> scenario_violations(const ScenarioConfig& cfg);

// Physical parameters for the target/donor configurations. Units: omega_a = 1.
struct PhysParams {
    double omega_a = 1.0;
    double omega_b = 1.0;
    double g_a = 0.0312;
    double g_b = 0.172;
    double g_donor = 0.12;
    double kappa = 0.12;
    double gamma_a = 0.07;
    double gamma_b = 0.012;

    bool operator==(const PhysParams&) const = default;
};

struct IntegrationParams {
    double step_size = 2.5e-3;
    double t_max = 1000.0;
    int record_stride = 10;
};

/// Level indices of the three-level target atom.
namespace level {
inline constexpr int S = 0;
inline constexpr int A = 1;
inline constexpr int B = 2;
}  // namespace level

/// One resonant two-level atom (levels "e", "g") in a single-mode cavity holding n photons.
ScenarioConfig build_jc_scenario(double g, int n_photons, double mode_freq = 1.0, const IntegrationParams& integ = {});

/// Cavity 0 with photons hopping in from n donor cavities that each hold one photon.
ScenarioConfig build_star_scenario(int n_donors, double kappa, double mode_freq,
                                   const IntegrationParams& integ = {});

/// Cavity 0 alone: n three-level atoms in S, leaking into sinkA/sinkB.
ScenarioConfig build_baseline(int n_atoms, const PhysParams& p, const IntegrationParams& integ = {});

/// Baseline plus a donor cavity holding m mode-A photons, linked on mode A.
ScenarioConfig build_config1(int n_atoms, int m_photons, const PhysParams& p,
                             const IntegrationParams& integ = {});

/// Baseline plus a donor cavity with m two-level atoms (transition A only) in their upper level.
ScenarioConfig build_config2(int n_atoms, int m_donor_atoms, const PhysParams& p,
                             const IntegrationParams& integ = {});

/// Stable 16-hex-digit FNV-1a digest of every field of the scenario.
std::string scenario_digest(const ScenarioConfig& cfg);

/// Retunes mode `mode_id` of `cavity` (and of every cavity linked to it on that
/// mode) to `frequency`. Atoms coupled to the mode keep their upper-level energy
/// and get their lower level moved to stay resonant. Couplings on the mode are
/// scaled by (frequency / old_frequency)^coupling_exponent.
ScenarioConfig retune_mode(ScenarioConfig cfg, int cavity, const std::string& mode_id, double frequency,
                           double coupling_exponent = 0.0);

}  // namespace cavistim
