#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cavistim/dynamics.hpp"
#include "cavistim/model.hpp"

namespace cavistim {

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct SweepCell {
    std::vector<double> coords;  // one value per axis
    std::optional<Metrics> metrics;
    int oscillations = 0;  // direction changes of the target atom's P_A
    double t_max_used = 0.0;
    std::string error;  // non-empty when the cell failed

    bool ok() const noexcept { return error.empty(); }
};

/// Cells are stored row-major: the last axis varies fastest.
struct SweepTable {
    std::vector<SweepAxis> axes;
    std::vector<SweepCell> cells;
    std::string base_digest;
    double step_size = 0.0;
    double t_max = 0.0;

    const SweepCell& at(std::size_t i, std::size_t j = 0) const;
};

struct SweepOptions {
    int threads = 1;
    std::size_t target_atom = 0;
    double window_fraction = 0.1;
    /// t_max is doubled until the plateau test passes, up to this factor.
    double max_extension = 4.0;
    /// Couplings on a retuned mode scale as (omega'/omega)^exponent.
    double coupling_exponent = 0.5;
    double oscillation_tolerance = 1e-6;
    IntegrateOptions integrate;
};

/// Runs one scenario the way a sweep cell does: integrate, extend t_max until
/// the asymptote converges, collect metrics. Failures land in `error`.
SweepCell evaluate_cell(const ScenarioConfig& cfg, const SweepOptions& opts);

/// Mode B of cavity 0 retuned to ratio * omega_A for each ratio (ratios >= 1).
SweepTable run_frequency_sweep(const ScenarioConfig& base, const std::vector<double>& ratios,
                               const SweepOptions& opts = {});

/// Every link strength set to kappa and every leak rate on cavity 0 scaled so
/// that the mode-A channel leaks at gamma (relative rates are preserved).
SweepTable run_intensity_sweep(const ScenarioConfig& base, const std::vector<double>& kappa_grid,
                               const std::vector<double>& gamma_grid, const SweepOptions& opts = {});

ScenarioConfig with_intensities(ScenarioConfig cfg, double kappa, double gamma);

/// Smallest grid value beyond which the crossing time improves by less than
/// `eps` (relative) per grid step. Absent entries break the run.
std::optional<double> detect_saturation(const std::vector<double>& grid,
                                        const std::vector<std::optional<double>>& crossing_times,
                                        double eps = 0.05);

/// Saturation along the kappa axis of an intensity table, at gamma index `gamma_index`.
std::optional<double> detect_saturation(const SweepTable& table, std::size_t gamma_index = 0, double eps = 0.05);

}  // namespace cavistim
