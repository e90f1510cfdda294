#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavistim/basis.hpp"
#include "cavistim/liouvillian.hpp"
#include "cavistim/model.hpp"

namespace cavistim {

/// Everything needed to evolve one scenario: basis, operators and the compiled generator.
struct OpenSystem {
    ValidatedScenario scenario;
    Basis basis;
    SparseHermitian hamiltonian;
    std::vector<JumpOperator> jumps;
    MasterEquation generator;
    std::size_t initial_index;

    DensityMatrix initial_state() const { return pure_state(basis.dim(), initial_index); }
};

OpenSystem assemble(const ValidatedScenario& cfg, std::size_t dim_cap = dimension_cap_from_env());

struct Channel {
    std::string name;
    std::vector<double> values;
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<Channel> channels;

    // diagnostics, one entry per sample
    std::vector<double> trace_error;
    std::vector<double> hermiticity_error;
    // (time, smallest eigenvalue) at monitored samples
    std::vector<std::pair<double, double>> min_eigenvalues;
    std::vector<std::string> warnings;

    DensityMatrix final_state;

    bool has_channel(const std::string& name) const;
    const std::vector<double>& channel(const std::string& name) const;
};

class StepUnstable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Stepper { Rk2Midpoint, Rk4 };

struct IntegrateOptions {
    Stepper stepper = Stepper::Rk2Midpoint;
    double trace_tolerance = 1e-6;
    double positivity_tolerance = 1e-6;
    /// Smallest eigenvalue is checked every this many samples (and at the end).
    int eigen_check_every = 100;
};

/// Explicit midpoint rule: rho + h * f(rho + h/2 * f(rho)).
template <class Rhs>
DensityMatrix rk2_step(Rhs&& rhs, const DensityMatrix& rho, double h)
{
    const DensityMatrix k1 = rhs(rho);
    const DensityMatrix mid = rho + (0.5 * h) * k1;
    return rho + h * rhs(mid);
}

template <class Rhs>
DensityMatrix rk4_step(Rhs&& rhs, const DensityMatrix& rho, double h)
{
    const DensityMatrix k1 = rhs(rho);
    const DensityMatrix k2 = rhs(rho + (0.5 * h) * k1);
    const DensityMatrix k3 = rhs(rho + (0.5 * h) * k2);
    const DensityMatrix k4 = rhs(rho + h * k3);
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// In-place stepper with preallocated stages, used by integrate().
class Propagator {
public:
    Propagator(const MasterEquation& generator, Stepper stepper);

    void step(DensityMatrix& rho, double h);

private:
    const MasterEquation& gen_;
    Stepper stepper_;
    DensityMatrix k1_, k2_, k3_, k4_, tmp_;
};

/// Largest step the stability guidance allows for this generator.
double recommended_step(const MasterEquation& generator);

/// Resumable fixed-step integration. Samples are taken every record_stride
/// steps counted from t = 0, plus the last step of every run_until call.
class Integrator {
public:
    Integrator(const OpenSystem& system, DensityMatrix rho0, IntegrateOptions opts = {});

    /// Advances to step ceil(t_end / h) and records along the way.
    void run_until(double t_end);

    double time() const noexcept { return static_cast<double>(step_) * h_; }
    const TimeSeries& series() const noexcept { return ts_; }
    const DensityMatrix& state() const noexcept { return rho_; }
    TimeSeries take();

private:
    struct Probe {
        std::string name;
        DiagonalObservable obs;
    };

    void record();

    const OpenSystem& system_;
    IntegrateOptions opts_;
    double h_;
    long long stride_;
    long long step_ = 0;
    long long samples_ = 0;
    DensityMatrix rho_;
    Propagator prop_;
    std::vector<Probe> probes_;
    std::vector<Probe> sinks_;
    std::vector<double> last_rate_;
    TimeSeries ts_;
};

/// Fixed-step integration from rho0 over [0, t_max], sampling every
/// record_stride steps (and at t_max). Channels:
///   atom{i}_P_{level}, cav{c}_{mode}_n, sink_{label}_emitted.
/// Throws StepUnstable when the trace drifts past trace_tolerance.
TimeSeries integrate(const OpenSystem& system, const DensityMatrix& rho0, const IntegrateOptions& opts = {});
TimeSeries integrate(const OpenSystem& system, const IntegrateOptions& opts = {});

double smallest_eigenvalue(const DensityMatrix& rho);

// --- metrics -------------------------------------------------------------

struct LevelNames {
    std::string top = "S";
    std::string target = "A";
    std::string competitor = "B";
};

std::string population_channel(std::size_t atom, const std::string& level);

/// First time (linearly interpolated between samples) at which P_target
/// exceeds both P_top and P_competitor.
std::optional<double> crossing_time(const TimeSeries& ts, std::size_t atom, const LevelNames& names = {});

struct Asymptote {
    double value = 0.0;
    bool converged = false;
    double drift = 0.0;  // (max - min) / max(|value|, 0.01) over the window
};

inline constexpr double kPlateauDrift = 1e-3;

/// Mean of P_target - P_competitor over the last window_fraction of samples.
Asymptote asymptotic_difference(const TimeSeries& ts, std::size_t atom, double window_fraction = 0.1,
                                const LevelNames& names = {});

/// Direction changes of the 3-sample moving average of a channel. A reversal
/// only counts after the smoothed value has moved more than `tolerance` away
/// from the previous turning point.
int oscillation_count(const std::vector<double>& values, double tolerance = 1e-6);
int oscillation_count(const TimeSeries& ts, const std::string& channel, double tolerance = 1e-6);

struct Metrics {
    std::optional<double> crossing_time;
    Asymptote asymptotic_difference;
    std::map<std::string, double> sink_totals;
};

Metrics compute_metrics(const TimeSeries& ts, std::size_t atom = 0, double window_fraction = 0.1);

}  // namespace cavistim
