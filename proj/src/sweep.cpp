#include "cavistim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace cavistim {

const SweepCell& SweepTable::at(std::size_t i, std::size_t j) const
{
    const std::size_t inner = axes.size() > 1 ? axes[1].values.size() : 1;
    return cells.at(i * inner + j);
}

SweepCell evaluate_cell(const ScenarioConfig& cfg, const SweepOptions& opts)
{
    SweepCell cell;
    try {
        const OpenSystem system = assemble(validate_scenario(cfg));
        Integrator integ(system, system.initial_state(), opts.integrate);
        double t_end = cfg.t_max;
        integ.run_until(t_end);
        auto asym = asymptotic_difference(integ.series(), opts.target_atom, opts.window_fraction);
        while (!asym.converged && 2.0 * t_end <= opts.max_extension * cfg.t_max * (1.0 + 1e-12)) {
            t_end *= 2.0;
            integ.run_until(t_end);
            asym = asymptotic_difference(integ.series(), opts.target_atom, opts.window_fraction);
        }
        const TimeSeries& ts = integ.series();
        cell.metrics = compute_metrics(ts, opts.target_atom, opts.window_fraction);
        cell.oscillations = oscillation_count(ts, population_channel(opts.target_atom, "A"), opts.oscillation_tolerance);
        cell.t_max_used = integ.time();
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

namespace {

SweepTable run_cells(std::vector<SweepAxis> axes, std::vector<ScenarioConfig> configs,
                     std::vector<std::vector<double>> coords, const ScenarioConfig& base, const SweepOptions& opts)
{
    SweepTable table;
    table.axes = std::move(axes);
    table.base_digest = scenario_digest(base);
    table.step_size = base.step_size;
    table.t_max = base.t_max;
    table.cells.resize(configs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            table.cells[i] = evaluate_cell(configs[i], opts);
            table.cells[i].coords = coords[i];
        }
    };
    const int nthreads = std::max(1, std::min<int>(opts.threads, static_cast<int>(configs.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }
    return table;
}

void require_increasing(const std::vector<double>& grid, const char* name)
{
    if (grid.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument(std::string(name) + " grid must be strictly increasing");
    }
}

}  // namespace

SweepTable run_frequency_sweep(const ScenarioConfig& base, const std::vector<double>& ratios, const SweepOptions& opts)
{
    require_increasing(ratios, "ratio");
    if (ratios.front() < 1.0) throw std::invalid_argument("frequency ratios must be >= 1");
    if (base.cavities.empty() || !base.cavities[0].find_mode("A") || !base.cavities[0].find_mode("B")) {
        throw std::invalid_argument("frequency sweep needs cavity 0 with modes A and B");
    }
    const double omega_a = base.cavities[0].find_mode("A")->frequency;

    std::vector<ScenarioConfig> configs;
    std::vector<std::vector<double>> coords;
    for (double r : ratios) {
        configs.push_back(retune_mode(base, 0, "B", r * omega_a, opts.coupling_exponent));
        coords.push_back({r});
    }
    return run_cells({{"ratio", ratios}}, std::move(configs), std::move(coords), base, opts);
}

ScenarioConfig with_intensities(ScenarioConfig cfg, double kappa, double gamma)
{
    for (auto& l : cfg.links) l.strength = kappa;
    double ref = 0.0;
    for (const auto& k : cfg.leaks) {
        if (k.cavity == 0 && k.mode_id == "A") ref = k.rate;
    }
    for (auto& k : cfg.leaks) {
        if (k.cavity != 0) continue;
        k.rate = ref > 0.0 ? k.rate * (gamma / ref) : gamma;
    }
    return cfg;
}

SweepTable run_intensity_sweep(const ScenarioConfig& base, const std::vector<double>& kappa_grid,
                               const std::vector<double>& gamma_grid, const SweepOptions& opts)
{
    require_increasing(kappa_grid, "kappa");
    require_increasing(gamma_grid, "gamma");
    if (kappa_grid.front() <= 0.0 || gamma_grid.front() <= 0.0) {
        throw std::invalid_argument("intensity grids must be positive");
    }
    std::vector<ScenarioConfig> configs;
    std::vector<std::vector<double>> coords;
    for (double kappa : kappa_grid) {
        for (double gamma : gamma_grid) {
            configs.push_back(with_intensities(base, kappa, gamma));
            coords.push_back({kappa, gamma});
        }
    }
    return run_cells({{"kappa", kappa_grid}, {"gamma", gamma_grid}}, std::move(configs), std::move(coords), base,
                     opts);
}

std::optional<double> detect_saturation(const std::vector<double>& grid,
                                        const std::vector<std::optional<double>>& crossing_times, double eps)
{
    if (grid.size() != crossing_times.size()) throw std::invalid_argument("grid and column sizes differ");
    // flat[i]: the step into grid point i gains less than eps (the first point has no step).
    auto flat = [&](std::size_t i) {
        if (!crossing_times[i]) return false;
        if (i == 0) return true;
        if (!crossing_times[i - 1]) return false;
        const double prev = *crossing_times[i - 1];
        return (prev - *crossing_times[i]) / prev < eps;
    };
    std::optional<double> result;
    for (std::size_t i = grid.size(); i-- > 0 && flat(i);) result = grid[i];
    return result;
}

std::optional<double> detect_saturation(const SweepTable& table, std::size_t gamma_index, double eps)
{
    if (table.axes.empty() || table.axes[0].name != "kappa") throw std::invalid_argument("table has no kappa axis");
    const auto& kappas = table.axes[0].values;
    std::vector<std::optional<double>> column;
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        const auto& cell = table.at(i, gamma_index);
        column.push_back(cell.ok() && cell.metrics ? cell.metrics->crossing_time : std::nullopt);
    }
    return detect_saturation(kappas, column, eps);
}

}  // namespace cavistim
