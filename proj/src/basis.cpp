#include "cavistim/basis.hpp"

#include <cmath>
#include <cstdlib>
#include <deque>
#include <set>
#include <sstream>

namespace cavistim {

std::string BasisState::to_string() const
{
    std::ostringstream os;
    os << '|';
    for (std::size_t i = 0; i < photons.size(); ++i) os << (i ? "," : "") << photons[i];
    if (!levels.empty()) {
        os << ';';
        for (std::size_t i = 0; i < levels.size(); ++i) os << (i ? "," : "") << levels[i];
    }
    os << '>';
    return os.str();
}

DimensionLimitExceeded::DimensionLimitExceeded(std::size_t cap)
    : std::runtime_error("basis dimension exceeds cap of " + std::to_string(cap) +
                         " (raise CAVISTIM_DIM_CAP to allow larger systems)"),
      cap_(cap)
{
}

Layout::Layout(const ScenarioConfig& cfg)
{
    for (int c = 0; c < static_cast<int>(cfg.cavities.size()); ++c) {
        const auto& cav = cfg.cavities[c];
        for (const auto& m : cav.modes) modes.push_back({c, m.mode_id, m.frequency});
        for (int a = 0; a < static_cast<int>(cav.atoms.size()); ++a) atoms.push_back({c, a, &cav.atoms[a]});
    }
}

std::optional<std::size_t> Layout::mode_slot(int cavity, const std::string& mode_id) const
{
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i].cavity == cavity && modes[i].mode_id == mode_id) return i;
    }
    return std::nullopt;
}

Basis::Basis(std::vector<BasisState> states) : states_(std::move(states))
{
    std::sort(states_.begin(), states_.end());
    states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

std::optional<std::size_t> Basis::index_of(const BasisState& s) const
{
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> state_index(const Basis& basis, const BasisState& s) { return basis.index_of(s); }

std::size_t dimension_cap_from_env()
{
    if (const char* env = std::getenv("CAVISTIM_DIM_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultDimCap;
}

BasisState initial_basis_state(const ValidatedScenario& vs)
{
    const auto& cfg = vs.config();
    BasisState s;
    for (const auto& cav : cfg.cavities) {
        for (const auto& m : cav.modes) {
            auto it = cav.initial_photons.find(m.mode_id);
            s.photons.push_back(it == cav.initial_photons.end() ? 0 : it->second);
        }
    }
    for (const auto& cav : cfg.cavities) {
        for (const auto& a : cav.atoms) s.levels.push_back(a.initial_level);
    }
    return s;
}

std::vector<Move> successors(const ScenarioConfig& cfg, const Layout& layout, const BasisState& s)
{
    std::vector<Move> out;

    std::size_t term = 0;
    for (std::size_t a = 0; a < layout.atoms.size(); ++a) {
        const auto& slot = layout.atoms[a];
        for (const auto& t : slot.spec->transitions) {
            const std::size_t ordinal = term++;
            if (t.coupling == 0.0) continue;
            const std::size_t k = *layout.mode_slot(slot.cavity, t.mode_id);
            const int n = s.photons[k];
            if (s.levels[a] == t.upper_level) {
                BasisState next = s;
                next.photons[k] = n + 1;
                next.levels[a] = t.lower_level;
                out.push_back({Move::Kind::Coupling, ordinal, std::move(next), t.coupling * std::sqrt(n + 1.0)});
            } else if (s.levels[a] == t.lower_level && n > 0) {
                BasisState next = s;
                next.photons[k] = n - 1;
                next.levels[a] = t.upper_level;
                out.push_back({Move::Kind::Coupling, ordinal, std::move(next), t.coupling * std::sqrt(double(n))});
            }
        }
    }

    for (std::size_t i = 0; i < cfg.links.size(); ++i) {
        const auto& l = cfg.links[i];
        if (l.strength == 0.0) continue;
        const std::size_t ka = *layout.mode_slot(l.cavity_a, l.mode_id);
        const std::size_t kb = *layout.mode_slot(l.cavity_b, l.mode_id);
        for (auto [from, to] : {std::pair{ka, kb}, std::pair{kb, ka}}) {
            const int nf = s.photons[from];
            if (nf == 0) continue;
            BasisState next = s;
            next.photons[from] = nf - 1;
            next.photons[to] += 1;
            const double amp = l.strength * std::sqrt(double(nf) * double(next.photons[to]));
            out.push_back({Move::Kind::Hopping, i, std::move(next), amp});
        }
    }

    for (std::size_t i = 0; i < cfg.leaks.size(); ++i) {
        const auto& leak = cfg.leaks[i];
        if (leak.rate == 0.0) continue;
        const std::size_t k = *layout.mode_slot(leak.cavity, leak.mode_id);
        const int n = s.photons[k];
        if (n == 0) continue;
        BasisState next = s;
        next.photons[k] = n - 1;
        out.push_back({Move::Kind::Leak, i, std::move(next), std::sqrt(double(n))});
    }
    return out;
}

Basis generate_basis(const ValidatedScenario& vs, std::size_t dim_cap)
{
    const auto& cfg = vs.config();
    const Layout layout(cfg);
    std::set<BasisState> seen;
    std::deque<BasisState> frontier;
    BasisState init = initial_basis_state(vs);
    seen.insert(init);
    frontier.push_back(std::move(init));
    while (!frontier.empty()) {
        BasisState s = std::move(frontier.front());
        frontier.pop_front();
        for (auto& mv : successors(cfg, layout, s)) {
            if (seen.insert(mv.target).second) {
                if (seen.size() > dim_cap) throw DimensionLimitExceeded(dim_cap);
                frontier.push_back(std::move(mv.target));
            }
        }
    }
    return Basis(std::vector<BasisState>(seen.begin(), seen.end()));
}

}  // namespace cavistim
