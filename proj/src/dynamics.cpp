#include "cavistim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace cavistim {

OpenSystem assemble(const ValidatedScenario& cfg, std::size_t dim_cap)
{
    Basis basis = generate_basis(cfg, dim_cap);
    SparseHermitian h = build_hamiltonian(cfg, basis);
    std::vector<JumpOperator> jumps = build_jump_operators(cfg, basis);
    MasterEquation gen(h, jumps);
    const std::size_t init = *basis.index_of(initial_basis_state(cfg));
    return OpenSystem{cfg, std::move(basis), std::move(h), std::move(jumps), std::move(gen), init};
}

bool TimeSeries::has_channel(const std::string& name) const
{
    return std::any_of(channels.begin(), channels.end(), [&](const Channel& c) { return c.name == name; });
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const
{
    for (const auto& c : channels) {
        if (c.name == name) return c.values;
    }
    throw std::out_of_range("time series has no channel '" + name + "'");
}

Propagator::Propagator(const MasterEquation& generator, Stepper stepper) : gen_(generator), stepper_(stepper) {}

void Propagator::step(DensityMatrix& rho, double h)
{
    if (stepper_ == Stepper::Rk2Midpoint) {
        gen_.apply(rho, k1_);
        tmp_ = rho + (0.5 * h) * k1_;
        gen_.apply(tmp_, k2_);
        rho += h * k2_;
        return;
    }
    gen_.apply(rho, k1_);
    tmp_ = rho + (0.5 * h) * k1_;
    gen_.apply(tmp_, k2_);
    tmp_ = rho + (0.5 * h) * k2_;
    gen_.apply(tmp_, k3_);
    tmp_ = rho + h * k3_;
    gen_.apply(tmp_, k4_);
    rho += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

double recommended_step(const MasterEquation& generator)
{
    const double s = generator.stiffness_estimate();
    return s > 0.0 ? 0.05 / s : std::numeric_limits<double>::infinity();
}

double smallest_eigenvalue(const DensityMatrix& rho)
{
    const DensityMatrix herm = 0.5 * (rho + rho.adjoint());
    const auto n = herm.rows();
    if (n == 0) return 0.0;
    if (n <= 256) {
        Eigen::SelfAdjointEigenSolver<DensityMatrix> es(herm, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    // Power iteration on (shift*I - rho); shift bounds the spectrum from above.
    double shift = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) shift = std::max(shift, herm.row(i).cwiseAbs().sum());
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n) / std::sqrt(double(n));
    double lambda = 0.0;
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXcd w = shift * v - herm * v;
        const double norm = w.norm();
        if (norm == 0.0) break;
        v = w / norm;
        lambda = (v.adjoint() * (shift * v - herm * v))(0).real();
    }
    return shift - lambda;
}

namespace {

double max_antihermitian(const DensityMatrix& rho)
{
    double m = 0.0;
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) m = std::max(m, std::abs(rho(i, j) - std::conj(rho(j, i))));
    }
    return m;
}

std::string fmt_time(double t)
{
    std::ostringstream os;
    os << t;
    return os.str();
}

}  // namespace

Integrator::Integrator(const OpenSystem& system, DensityMatrix rho0, IntegrateOptions opts)
    : system_(system),
      opts_(opts),
      h_(system.scenario->step_size),
      stride_(system.scenario->record_stride),
      rho_(std::move(rho0)),
      prop_(system.generator, opts.stepper)
{
    if (static_cast<std::size_t>(rho_.rows()) != system.basis.dim() || rho_.rows() != rho_.cols()) {
        throw std::invalid_argument("initial density matrix does not match the basis dimension");
    }
    const Layout layout(system.scenario.config());
    if (h_ > recommended_step(system.generator)) {
        ts_.warnings.push_back("step size " + fmt_time(h_) + " exceeds stability guidance " +
                               fmt_time(recommended_step(system.generator)));
    }

    for (std::size_t a = 0; a < layout.atoms.size(); ++a) {
        const auto& spec = *layout.atoms[a].spec;
        for (int l = 0; l < static_cast<int>(spec.level_energies.size()); ++l) {
            probes_.push_back({population_channel(a, spec.level_name(l)),
                               population_operator(system.scenario, system.basis, AtomLevelSelector{a, l})});
        }
    }
    for (const auto& m : layout.modes) {
        probes_.push_back({"cav" + std::to_string(m.cavity) + "_" + m.mode_id + "_n",
                           population_operator(system.scenario, system.basis,
                                               ModeOccupationSelector{m.cavity, m.mode_id})});
    }

    // Emission rate observables rate_k * diag(A_k^+ A_k), summed per sink label.
    for (const auto& jump : system.jumps) {
        const std::string name = "sink_" + jump.sink_label + "_emitted";
        auto it = std::find_if(sinks_.begin(), sinks_.end(), [&](const Probe& p) { return p.name == name; });
        if (it == sinks_.end()) {
            sinks_.push_back({name, {Eigen::VectorXd::Zero(system.basis.dim())}});
            it = std::prev(sinks_.end());
        }
        for (const auto& e : jump.matrix) it->obs.diagonal[e.col] += jump.rate * std::norm(e.value);
    }

    for (const auto& p : probes_) ts_.channels.push_back({p.name, {}});
    for (const auto& s : sinks_) ts_.channels.push_back({s.name, {}});
    last_rate_.assign(sinks_.size(), 0.0);
    record();
}

void Integrator::record()
{
    const double t = time();
    const double tr_err = std::abs(rho_.trace() - Complex(1.0, 0.0));
    if (!std::isfinite(tr_err) || tr_err > opts_.trace_tolerance) {
        throw StepUnstable("trace error " + fmt_time(tr_err) + " at t=" + fmt_time(t) +
                           " exceeds tolerance; reduce the step size");
    }
    ts_.times.push_back(t);
    ts_.trace_error.push_back(tr_err);
    ts_.hermiticity_error.push_back(max_antihermitian(rho_));
    std::size_t c = 0;
    for (const auto& p : probes_) ts_.channels[c++].values.push_back(expectation(p.obs, rho_));
    for (std::size_t k = 0; k < sinks_.size(); ++k, ++c) {
        const double rate = expectation(sinks_[k].obs, rho_);
        auto& vals = ts_.channels[c].values;
        if (vals.empty()) {
            vals.push_back(0.0);
        } else {
            const double dt = t - ts_.times[ts_.times.size() - 2];
            vals.push_back(vals.back() + 0.5 * dt * (last_rate_[k] + rate));
        }
        last_rate_[k] = rate;
    }
    if (opts_.eigen_check_every > 0 && samples_ % opts_.eigen_check_every == 0) {
        const double lmin = smallest_eigenvalue(rho_);
        ts_.min_eigenvalues.emplace_back(t, lmin);
        if (lmin < -opts_.positivity_tolerance) {
            ts_.warnings.push_back("positivity breach: smallest eigenvalue " + fmt_time(lmin) + " at t=" +
                                   fmt_time(t));
        }
    }
    ++samples_;
}

void Integrator::run_until(double t_end)
{
    const auto target = static_cast<long long>(std::ceil(t_end / h_ - 1e-9));
    if (target <= step_) return;
    while (step_ < target) {
        prop_.step(rho_, h_);
        ++step_;
        if (step_ % stride_ == 0 || step_ == target) record();
    }
    if (opts_.eigen_check_every > 0 && (ts_.min_eigenvalues.empty() || ts_.min_eigenvalues.back().first != time())) {
        const double lmin = smallest_eigenvalue(rho_);
        ts_.min_eigenvalues.emplace_back(time(), lmin);
        if (lmin < -opts_.positivity_tolerance) {
            ts_.warnings.push_back("positivity breach: smallest eigenvalue " + fmt_time(lmin) + " at t=" +
                                   fmt_time(time()));
        }
    }
    ts_.final_state = rho_;
}

TimeSeries Integrator::take()
{
    ts_.final_state = rho_;
    return std::move(ts_);
}

TimeSeries integrate(const OpenSystem& system, const IntegrateOptions& opts)
{
    return integrate(system, system.initial_state(), opts);
}

TimeSeries integrate(const OpenSystem& system, const DensityMatrix& rho0, const IntegrateOptions& opts)
{
    Integrator integ(system, rho0, opts);
    integ.run_until(system.scenario->t_max);
    return integ.take();
}

std::string population_channel(std::size_t atom, const std::string& level)
{
    return "atom" + std::to_string(atom) + "_P_" + level;
}

std::optional<double> crossing_time(const TimeSeries& ts, std::size_t atom, const LevelNames& names)
{
    const auto& top = ts.channel(population_channel(atom, names.top));
    const auto& tgt = ts.channel(population_channel(atom, names.target));
    const auto& cmp = ts.channel(population_channel(atom, names.competitor));
    const auto& t = ts.times;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d1 = tgt[i] - top[i];
        const double d2 = tgt[i] - cmp[i];
        if (!(d1 > 0.0 && d2 > 0.0)) continue;
        if (i == 0) return t[0];
        // Both gaps are linear on the interval; the later zero crossing is where both hold.
        double frac = 0.0;
        for (auto [now, before] : {std::pair{d1, tgt[i - 1] - top[i - 1]}, std::pair{d2, tgt[i - 1] - cmp[i - 1]}}) {
            if (before <= 0.0) frac = std::max(frac, -before / (now - before));
        }
        return t[i - 1] + frac * (t[i] - t[i - 1]);
    }
    return std::nullopt;
}

Asymptote asymptotic_difference(const TimeSeries& ts, std::size_t atom, double window_fraction,
                                const LevelNames& names)
{
    const auto& tgt = ts.channel(population_channel(atom, names.target));
    const auto& cmp = ts.channel(population_channel(atom, names.competitor));
    const std::size_t n = tgt.size();
    if (n == 0) return {};
    const std::size_t w = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(n))), 1, n);
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = n - w; i < n; ++i) {
        const double d = tgt[i] - cmp[i];
        sum += d;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    Asymptote a;
    a.value = sum / static_cast<double>(w);
    a.drift = (hi - lo) / std::max(std::abs(a.value), 0.01);
    a.converged = w >= 2 && a.drift <= kPlateauDrift;
    return a;
}

int oscillation_count(const std::vector<double>& values, double tolerance)
{
    if (values.size() < 4) return 0;
    std::vector<double> smooth(values.size() - 2);
    for (std::size_t i = 0; i + 2 < values.size(); ++i) smooth[i] = (values[i] + values[i + 1] + values[i + 2]) / 3.0;

    int count = 0;
    int dir = 0;  // direction of the current run
    double pivot = smooth[0];  // last turning point (or start)
    double extreme = smooth[0];  // furthest value of the current run
    for (std::size_t i = 1; i < smooth.size(); ++i) {
        const double v = smooth[i];
        if (dir == 0) {
            if (std::abs(v - pivot) > tolerance) {
                dir = v > pivot ? 1 : -1;
                extreme = v;
            }
            continue;
        }
        if ((dir > 0 && v > extreme) || (dir < 0 && v < extreme)) {
            extreme = v;
        } else if (std::abs(v - extreme) > tolerance) {
            ++count;
            dir = -dir;
            pivot = extreme;
            extreme = v;
        }
    }
    return count;
}

int oscillation_count(const TimeSeries& ts, const std::string& channel, double tolerance)
{
    return oscillation_count(ts.channel(channel), tolerance);
}

Metrics compute_metrics(const TimeSeries& ts, std::size_t atom, double window_fraction)
{
    Metrics m;
    const LevelNames names;
    if (ts.has_channel(population_channel(atom, names.top)) && ts.has_channel(population_channel(atom, names.target)) &&
        ts.has_channel(population_channel(atom, names.competitor))) {
        m.crossing_time = crossing_time(ts, atom, names);
        m.asymptotic_difference = asymptotic_difference(ts, atom, window_fraction, names);
    }
    for (const auto& c : ts.channels) {
        if (c.name.rfind("sink_", 0) == 0 && !c.values.empty()) {
            const std::string label = c.name.substr(5, c.name.size() - 5 - std::string("_emitted").size());
            m.sink_totals[label] = c.values.back();
        }
    }
    return m;
}

}  // namespace cavistim
