// cavistim: command-line front end for simulations, sweeps, validation and plots.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavistim/acceptance.hpp"
#include "cavistim/dynamics.hpp"
#include "cavistim/io/csv.hpp"
#include "cavistim/io/grid.hpp"
#include "cavistim/io/manifest.hpp"
#include "cavistim/io/scenario_json.hpp"
#include "cavistim/io/svg_plot.hpp"
#include "cavistim/sweep.hpp"

namespace fs = std::filesystem;
using namespace cavistim;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnstable = 3;

struct ScenarioArgs {
    std::string config;
    std::string builder;
    int n = 1;
    int m = 1;
    std::vector<std::string> set;
    std::optional<double> h;
    std::optional<double> t_max;
    std::optional<int> record_stride;
    int threads = 1;
    std::string out = ".";
    bool svg = true;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& a)
{
    auto* cfg = cmd->add_option("--config", a.config, "scenario JSON file");
    auto* bld = cmd->add_option("--builder", a.builder, "baseline | config1 | config2 | star | jc")
                    ->check(CLI::IsMember({"baseline", "config1", "config2", "star", "jc"}));
    cfg->excludes(bld);
    cmd->add_option("--n", a.n, "target atoms (star: donor cavities; jc: photons)");
    cmd->add_option("--m", a.m, "donor photons (config1) or donor atoms (config2)");
    cmd->add_option("--set", a.set, "override a physical parameter, e.g. --set kappa=0.2");
    cmd->add_option("--h", a.h, "step size");
    cmd->add_option("--t-max", a.t_max, "integration horizon");
    cmd->add_option("--record-stride", a.record_stride, "steps between recorded samples");
    cmd->add_option("--threads", a.threads, "sweep workers")->check(CLI::PositiveNumber);
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_flag("--svg,!--no-svg", a.svg, "write SVG plots (default on)");
}

PhysParams resolve_params(const std::vector<std::string>& sets)
{
    PhysParams p;
    std::map<std::string, double*> fields = {{"omega_a", &p.omega_a}, {"omega_b", &p.omega_b}, {"g_a", &p.g_a},
                                             {"g_b", &p.g_b},         {"g_donor", &p.g_donor}, {"kappa", &p.kappa},
                                             {"gamma_a", &p.gamma_a}, {"gamma_b", &p.gamma_b}};
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        const auto it = fields.find(s.substr(0, eq));
        if (eq == std::string::npos || it == fields.end()) {
            throw std::invalid_argument("--set expects name=value with name one of omega_a, omega_b, g_a, g_b, "
                                        "g_donor, kappa, gamma_a, gamma_b; got '" + s + "'");
        }
        try {
            *it->second = std::stod(s.substr(eq + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("--set " + s + ": not a number");
        }
    }
    return p;
}

struct Resolved {
    ScenarioConfig config;
    io::RunManifest manifest;
};

Resolved resolve(const ScenarioArgs& a, const std::string& command)
{
    Resolved r;
    r.manifest.command = command;
    if (!a.config.empty()) {
        r.config = io::read_scenario(a.config);
        r.manifest.source = a.config;
    } else {
        if (a.builder.empty()) throw std::invalid_argument("one of --config or --builder is required");
        const PhysParams p = resolve_params(a.set);
        r.manifest.source = a.builder;
        r.manifest.arguments = {{"n", std::to_string(a.n)}, {"m", std::to_string(a.m)}};
        for (const auto& s : a.set) r.manifest.arguments["set " + s.substr(0, s.find('='))] = s.substr(s.find('=') + 1);
        if (a.builder == "baseline") {
            r.config = build_baseline(a.n, p);
        } else if (a.builder == "config1") {
            r.config = build_config1(a.n, a.m, p);
        } else if (a.builder == "config2") {
            r.config = build_config2(a.n, a.m, p);
        } else if (a.builder == "star") {
            r.config = build_star_scenario(a.n, p.kappa, p.omega_a);
        } else {
            r.config = build_jc_scenario(p.g_a, a.n, p.omega_a);
        }
        r.manifest.parameters = io::parameter_map(p);
    }
    if (a.h) r.config.step_size = *a.h;
    if (a.t_max) r.config.t_max = *a.t_max;
    if (a.record_stride) r.config.record_stride = *a.record_stride;
    r.manifest.step_size = r.config.step_size;
    r.manifest.t_max = r.config.t_max;
    r.manifest.record_stride = r.config.record_stride;
    r.manifest.threads = a.threads;
    r.manifest.config_digest = scenario_digest(r.config);
    return r;
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

int cmd_simulate(const ScenarioArgs& a)
{
    Resolved r = resolve(a, "simulate");
    const ValidatedScenario vs = validate_scenario(r.config);
    const OpenSystem system = assemble(vs);
    const TimeSeries ts = integrate(system);
    for (const auto& w : ts.warnings) std::cerr << "warning: " << w << '\n';

    fs::create_directories(a.out);
    const fs::path dir(a.out);
    io::write_scenario(r.config, dir / "scenario.json");
    io::write_timeseries_csv(dir / "ts.csv", ts);
    r.manifest.outputs = {"scenario.json", "ts.csv"};

    const bool has_target = ts.has_channel(population_channel(0, "A")) && ts.has_channel(population_channel(0, "B"));
    if (has_target) {
        const Metrics m = compute_metrics(ts);
        io::write_metrics_csv(dir / "metrics.csv", m);
        r.manifest.outputs.push_back("metrics.csv");
        std::cout << "dimension        " << system.basis.dim() << '\n'
                  << "crossing_time    " << (m.crossing_time ? fmt(*m.crossing_time) : "none") << '\n'
                  << "asymptotic_diff  " << fmt(m.asymptotic_difference.value)
                  << (m.asymptotic_difference.converged ? "" : "  (not converged, raise --t-max)") << '\n';
        for (const auto& [label, total] : m.sink_totals) std::cout << "sink " << label << "  " << fmt(total) << '\n';
    } else {
        std::cout << "dimension        " << system.basis.dim() << '\n';
    }
    if (a.svg) {
        io::PlotSpec spec;
        spec.title = r.manifest.source;
        spec.x_label = "t";
        for (const auto& c : ts.channels) {
            if (c.name.rfind("atom", 0) == 0 || c.name.rfind("cav", 0) == 0) spec.y.push_back(c.name);
        }
        io::render_plot(dir / "ts.csv", spec, dir / "plot.svg");
        r.manifest.outputs.push_back("plot.svg");
    }
    r.manifest.outputs.push_back("manifest.json");
    io::write_manifest(r.manifest, dir / "manifest.json");
    return 0;
}

int finish_sweep(const SweepTable& table, Resolved& r, const ScenarioArgs& a)
{
    fs::create_directories(a.out);
    const fs::path dir(a.out);
    io::write_sweep_csv(dir / "sweep.csv", table);
    r.manifest.outputs = {"sweep.csv"};

    int failed = 0;
    for (const auto& c : table.cells) failed += !c.ok();
    std::cout << table.cells.size() << " cells, " << failed << " failed\n";

    if (a.svg) {
        io::PlotSpec spec;
        spec.x = table.axes[0].name;
        if (table.axes.size() > 1) spec.group_by = table.axes[1].name;
        spec.y = {"asymptotic_diff"};
        spec.title = "asymptotic P_A - P_B";
        io::render_plot(dir / "sweep.csv", spec, dir / "sweep_asymptote.svg");
        spec.y = {"crossing_time"};
        spec.title = "crossing time";
        io::render_plot(dir / "sweep.csv", spec, dir / "sweep_crossing.svg");
        r.manifest.outputs.push_back("sweep_asymptote.svg");
        r.manifest.outputs.push_back("sweep_crossing.svg");
    }
    r.manifest.outputs.push_back("manifest.json");
    io::write_manifest(r.manifest, dir / "manifest.json");
    return 0;
}

SweepOptions sweep_options(const ScenarioArgs& a)
{
    SweepOptions so;
    so.threads = a.threads;
    return so;
}

int cmd_sweep_freq(ScenarioArgs a, const std::string& ratios)
{
    if (a.config.empty() && a.builder.empty()) a.builder = "config2";
    const auto grid = io::parse_grid(ratios);
    Resolved r = resolve(a, "sweep freq");
    r.manifest.arguments["ratios"] = ratios;
    validate_scenario(r.config);
    const SweepTable table = run_frequency_sweep(r.config, grid, sweep_options(a));
    return finish_sweep(table, r, a);
}

int cmd_sweep_intensity(ScenarioArgs a, const std::string& kappa, const std::string& gamma)
{
    if (a.config.empty() && a.builder.empty()) a.builder = "config2";
    const auto kgrid = io::parse_grid(kappa);
    const auto ggrid = io::parse_grid(gamma);
    Resolved r = resolve(a, "sweep intensity");
    r.manifest.arguments["kappa"] = kappa;
    r.manifest.arguments["gamma"] = gamma;
    validate_scenario(r.config);
    const SweepTable table = run_intensity_sweep(r.config, kgrid, ggrid, sweep_options(a));
    return finish_sweep(table, r, a);
}

int cmd_validate(const std::vector<std::string>& only, std::optional<double> h, int threads)
{
    AcceptanceOptions opts;
    opts.h_override = h;
    opts.threads = threads;
    const auto results = run_acceptance(opts, only, std::cout);
    int failed = 0;
    for (const auto& r : results) failed += !r.passed;
    std::cout << results.size() - failed << '/' << results.size() << " criteria passed\n";
    if (failed) {
        std::cerr << "failed:";
        for (const auto& r : results) {
            if (!r.passed) std::cerr << ' ' << r.key;
        }
        std::cerr << '\n';
        return kExitFailure;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lindblad simulator for coupled-cavity three-level atoms"};
    // -h stays free for the step-size option
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    ScenarioArgs sim;
    auto* simulate = app.add_subcommand("simulate", "integrate one scenario and write ts.csv, metrics.csv, plot.svg");
    add_scenario_options(simulate, sim);

    auto* sweep = app.add_subcommand("sweep", "parameter sweeps");
    sweep->require_subcommand(1);
    ScenarioArgs freq_args;
    std::string ratios;
    auto* freq = sweep->add_subcommand("freq", "sweep omega_B / omega_A");
    add_scenario_options(freq, freq_args);
    freq->add_option("--ratios", ratios, "grid: start:stop:count, log:start:stop:count or a,b,c")->required();

    ScenarioArgs int_args;
    std::string kappa_grid, gamma_grid;
    auto* intensity = sweep->add_subcommand("intensity", "sweep waveguide strength and leak rate");
    add_scenario_options(intensity, int_args);
    intensity->add_option("--kappa", kappa_grid, "kappa grid")->required();
    intensity->add_option("--gamma", gamma_grid, "gamma grid (mode-A leak rate)")->required();

    std::vector<std::string> only;
    std::optional<double> val_h;
    int val_threads = 1;
    auto* validate = app.add_subcommand("validate", "run the acceptance criteria");
    validate->add_option("--only", only, "criterion keys, comma separated or repeated")->delimiter(',');
    validate->add_option("--h", val_h, "step size for the fixed-step checks");
    validate->add_option("--threads", val_threads, "sweep workers")->check(CLI::PositiveNumber);

    std::string plot_csv, plot_out, plot_x = "t", plot_group, plot_title;
    std::vector<std::string> plot_y;
    auto* plot = app.add_subcommand("plot", "render a CSV as SVG");
    plot->add_option("csv", plot_csv, "input CSV")->required();
    plot->add_option("--out", plot_out, "output SVG (default: CSV path with .svg)");
    plot->add_option("--x", plot_x, "x column");
    plot->add_option("--y", plot_y, "y columns, comma separated (default: all but x and trace_err)")->delimiter(',');
    plot->add_option("--group-by", plot_group, "split rows into one line per value of this column");
    plot->add_option("--title", plot_title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (freq->parsed()) return cmd_sweep_freq(freq_args, ratios);
        if (intensity->parsed()) return cmd_sweep_intensity(int_args, kappa_grid, gamma_grid);
        if (validate->parsed()) return cmd_validate(only, val_h, val_threads);
        if (plot->parsed()) {
            io::PlotSpec spec;
            spec.x = plot_x;
            spec.y = plot_y;
            spec.group_by = plot_group;
            spec.title = plot_title;
            std::cout << io::render_plot(plot_csv, spec, plot_out).string() << '\n';
            return 0;
        }
    } catch (const StepUnstable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUnstable;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const io::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const io::CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
