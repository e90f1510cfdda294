#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavistim/model.hpp"

namespace cavistim {

/// One Fock-plus-atomic-level configuration. Photon occupations follow the
/// (cavity, mode) declaration order; atom levels follow (cavity, atom) order.
struct BasisState {
    std::vector<int> photons;
    std::vector<int> levels;

    auto operator<=>(const BasisState&) const = default;
    bool operator==(const BasisState&) const = default;

    std::string to_string() const;
};

class DimensionLimitExceeded : public std::runtime_error {
public:
    DimensionLimitExceeded(std::size_t cap);
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

/// Flattened addressing of the scenario's degrees of freedom.
struct ModeSlot {
    int cavity;
    std::string mode_id;
    double frequency;
};

struct AtomSlot {
    int cavity;
    int atom;  // index within the cavity
    const AtomSpec* spec;
};

struct Layout {
    std::vector<ModeSlot> modes;
    std::vector<AtomSlot> atoms;

    explicit Layout(const ScenarioConfig& cfg);

    std::optional<std::size_t> mode_slot(int cavity, const std::string& mode_id) const;
    /// `atom` counts across cavities in declaration order.
    const AtomSlot& atom(std::size_t global_index) const { return atoms.at(global_index); }
};

/// Canonically ordered reachable state space.
class Basis {
public:
    explicit Basis(std::vector<BasisState> states);

    std::size_t dim() const noexcept { return states_.size(); }
    const std::vector<BasisState>& states() const noexcept { return states_; }
    const BasisState& operator[](std::size_t i) const { return states_[i]; }

    std::optional<std::size_t> index_of(const BasisState& s) const;

private:
    std::vector<BasisState> states_;
    std::map<BasisState, std::size_t> index_;
};

inline constexpr std::size_t kDefaultDimCap = 20000;

/// Cap taken from CAVISTIM_DIM_CAP when set and valid, else kDefaultDimCap.
std::size_t dimension_cap_from_env();

BasisState initial_basis_state(const ValidatedScenario& cfg);

/// A single application of one Hamiltonian term or jump operator.
struct Move {
    enum class Kind { Coupling, Hopping, Leak };
    Kind kind;
    std::size_t term;  // transition/link/leak ordinal
    BasisState target;
    double amplitude;  // bosonic matrix element
};

/// Every state reachable from `s` through one nonzero term (both directions of
/// each Hermitian term, plus photon removal for each leak with nonzero rate).
std::vector<Move> successors(const ScenarioConfig& cfg, const Layout& layout, const BasisState& s);

/// Breadth-first closure of the initial state under all generators.
Basis generate_basis(const ValidatedScenario& cfg, std::size_t dim_cap = dimension_cap_from_env());

std::optional<std::size_t> state_index(const Basis& basis, const BasisState& s);

}  // namespace cavistim
