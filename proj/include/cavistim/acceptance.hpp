#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cavistim/model.hpp"

namespace cavistim {

struct AcceptanceOptions {
    /// Replaces the step size of the fixed-h checks (criteria 1-6 and 12).
    std::optional<double> h_override;
    int threads = 1;
    PhysParams params{};
};

struct CriterionResult {
    int id = 0;
    std::string key;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Criterion keys in order: trace, oracle, rabi, induction, hopping, star,
/// sign-flip, config1, frequency, saturation, stabilization, order, determinism.
const std::vector<std::string>& acceptance_keys();

/// Runs the selected criteria (all when `only` is empty) and prints one
/// "PASS"/"FAIL" line per criterion to `out`. Unknown keys throw std::invalid_argument.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, const std::vector<std::string>& only,
                                            std::ostream& out);

}  // namespace cavistim
