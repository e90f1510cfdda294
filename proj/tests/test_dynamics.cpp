#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavistim/dynamics.hpp"

using namespace cavistim;

namespace {

TimeSeries populations(const std::vector<double>& t, const std::vector<double>& s, const std::vector<double>& a,
                       const std::vector<double>& b)
{
    TimeSeries ts;
    ts.times = t;
    ts.channels = {{"atom0_P_S", s}, {"atom0_P_A", a}, {"atom0_P_B", b}};
    return ts;
}

ScenarioConfig single_photon_decay(double rate)
{
    ScenarioConfig cfg;
    CavitySpec cav;
    cav.modes = {{"A", 1.0}};
    cav.initial_photons = {{"A", 1}};
    cfg.cavities.push_back(cav);
    cfg.leaks = {{0, "A", rate, "out"}};
    cfg.step_size = 1e-4;
    cfg.t_max = 1.0;
    cfg.record_stride = 10;
    return cfg;
}

}  // namespace

TEST_CASE("pure decay reaches exp(-1)")
{
    const OpenSystem sys = assemble(validate_scenario(single_photon_decay(1.0)));
    const TimeSeries ts = integrate(sys);
    CHECK(ts.times.back() == doctest::Approx(1.0));
    CHECK(ts.channel("cav0_A_n").back() == doctest::Approx(0.36788).epsilon(1e-5));
    CHECK(ts.channel("sink_out_emitted").back() == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
    const Metrics m = compute_metrics(ts);
    CHECK(m.sink_totals.at("out") == ts.channel("sink_out_emitted").back());
}

TEST_CASE("resonant Rabi oscillation")
{
    auto cfg = build_jc_scenario(0.1, 0);
    cfg.step_size = 1e-3;
    cfg.t_max = 40.0;
    const TimeSeries ts = integrate(assemble(validate_scenario(cfg)));
    const auto& pe = ts.channel("atom0_P_e");
    const auto& pg = ts.channel("atom0_P_g");
    for (std::size_t i = 0; i < ts.times.size(); ++i) {
        const double c = std::cos(0.1 * ts.times[i]);
        CHECK(pe[i] == doctest::Approx(c * c).epsilon(1e-6));
        CHECK(pe[i] + pg[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("conservation laws")
{
    SUBCASE("leak-free: level sums and excitation number")
    {
        auto cfg = build_config2(1, 1, PhysParams{});
        cfg.leaks.clear();
        cfg.t_max = 200.0;
        const auto vs = validate_scenario(cfg);
        const OpenSystem sys = assemble(vs);
        const TimeSeries ts = integrate(sys);
        const auto& s = ts.channel("atom0_P_S");
        const auto& a = ts.channel("atom0_P_A");
        const auto& b = ts.channel("atom0_P_B");
        for (std::size_t i = 0; i < ts.times.size(); ++i) CHECK(std::abs(s[i] + a[i] + b[i] - 1.0) <= 1e-9);
        const auto n = excitation_operator(vs, sys.basis);
        CHECK(std::abs(expectation(n, ts.final_state) - 2.0) <= 1e-8);
    }
    SUBCASE("with leaks: trace, Hermiticity, excitation non-increasing")
    {
        auto cfg = build_config2(1, 1, PhysParams{});
        cfg.t_max = 200.0;
        cfg.record_stride = 1;
        const auto vs = validate_scenario(cfg);
        const OpenSystem sys = assemble(vs);
        const auto n = excitation_operator(vs, sys.basis);
        Integrator integ(sys, sys.initial_state());
        double prev = expectation(n, integ.state());
        for (int k = 1; k <= 2000; ++k) {
            integ.run_until(k * 0.1);
            const double now = expectation(n, integ.state());
            CHECK(now <= prev + 1e-9);
            prev = now;
        }
        const TimeSeries& ts = integ.series();
        for (std::size_t i = 0; i < ts.times.size(); ++i) {
            CHECK(ts.trace_error[i] <= 1e-10);
            CHECK(ts.hermiticity_error[i] <= 1e-10);
        }
        for (const auto& [t, lmin] : ts.min_eigenvalues) CHECK(lmin >= -1e-6);
    }
}

TEST_CASE("resumed integration matches a single run")
{
    auto cfg = build_config2(1, 1, PhysParams{});
    cfg.t_max = 100.0;
    const OpenSystem sys = assemble(validate_scenario(cfg));
    const TimeSeries once = integrate(sys);
    Integrator integ(sys, sys.initial_state());
    integ.run_until(50.0);
    integ.run_until(100.0);
    const TimeSeries& twice = integ.series();
    REQUIRE(once.times.size() == twice.times.size());
    CHECK(once.times == twice.times);
    for (std::size_t c = 0; c < once.channels.size(); ++c) CHECK(once.channels[c].values == twice.channels[c].values);
    CHECK((once.final_state - twice.final_state).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("runaway step raises StepUnstable")
{
    auto cfg = build_jc_scenario(100.0, 0);
    cfg.step_size = 1.0;
    cfg.t_max = 1000.0;
    cfg.record_stride = 1;
    const OpenSystem sys = assemble(validate_scenario(cfg));
    CHECK(recommended_step(sys.generator) < 1.0);
    CHECK_THROWS_AS(integrate(sys), StepUnstable);
}

TEST_CASE("step guidance warning")
{
    auto cfg = build_jc_scenario(0.1, 0);
    cfg.step_size = 0.5;
    cfg.t_max = 1.0;
    const TimeSeries ts = integrate(assemble(validate_scenario(cfg)));
    REQUIRE_FALSE(ts.warnings.empty());
    CHECK(ts.warnings[0].find("stability guidance") != std::string::npos);
}

TEST_CASE("RK4 stepper")
{
    auto cfg = build_jc_scenario(0.1, 1);
    cfg.step_size = 0.05;
    cfg.t_max = 30.0;
    IntegrateOptions opts;
    opts.stepper = Stepper::Rk4;
    const TimeSeries ts = integrate(assemble(validate_scenario(cfg)), opts);
    const double c = std::cos(0.1 * std::sqrt(2.0) * ts.times.back());
    CHECK(ts.channel("atom0_P_e").back() == doctest::Approx(c * c).epsilon(1e-8));
}

TEST_CASE("smallest eigenvalue")
{
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
    rho(0, 0) = 0.7;
    rho(1, 1) = 0.4;
    rho(2, 2) = -0.1;
    CHECK(smallest_eigenvalue(rho) == doctest::Approx(-0.1));
}

TEST_CASE("crossing_time")
{
    SUBCASE("P_A dominates from the start")
    {
        const auto ts = populations({0, 1}, {0.1, 0.1}, {0.8, 0.8}, {0.1, 0.1});
        CHECK(crossing_time(ts, 0) == 0.0);
    }
    SUBCASE("never dominates")
    {
        const auto ts = populations({0, 1, 2}, {1.0, 0.5, 0.2}, {0.0, 0.1, 0.3}, {0.0, 0.4, 0.5});
        CHECK_FALSE(crossing_time(ts, 0).has_value());
    }
    SUBCASE("interpolates the later of the two crossings")
    {
        // P_A - P_S: -1 -> +0.2 crosses at 5/6; P_A - P_B: -0.2 -> +0.2 crosses at 1/2
        const auto ts = populations({0, 1}, {1.0, 0.3}, {0.0, 0.5}, {0.2, 0.3});
        REQUIRE(crossing_time(ts, 0).has_value());
        CHECK(*crossing_time(ts, 0) == doctest::Approx(5.0 / 6.0));
    }
    SUBCASE("first of several crossings")
    {
        const auto ts = populations({0, 1, 2, 3, 4}, {1, 0.2, 0.2, 0.2, 0.2}, {0, 0.6, 0.3, 0.6, 0.6},
                                    {0, 0.2, 0.5, 0.2, 0.2});
        CHECK(*crossing_time(ts, 0) < 1.0);
    }
}

TEST_CASE("asymptotic_difference")
{
    std::vector<double> t(100), s(100, 0.1), a(100, 0.8), b(100, 0.1);
    for (int i = 0; i < 100; ++i) t[i] = i;
    const auto c = asymptotic_difference(populations(t, s, a, b), 0);
    CHECK(c.value == doctest::Approx(0.7));
    CHECK(c.converged);

    const auto sym = asymptotic_difference(populations(t, s, b, b), 0);
    CHECK(sym.value == 0.0);
    CHECK(sym.converged);

    std::vector<double> drifting(100);
    for (int i = 0; i < 100; ++i) drifting[i] = 0.5 + 0.01 * i;
    const auto d = asymptotic_difference(populations(t, s, drifting, b), 0);
    CHECK_FALSE(d.converged);
    CHECK(d.drift > kPlateauDrift);
}

TEST_CASE("oscillation_count")
{
    std::vector<double> mono(200), flat(200, 0.3), cosine(4001);
    for (int i = 0; i < 200; ++i) mono[i] = std::exp(-0.01 * i);
    CHECK(oscillation_count(mono) == 0);
    CHECK(oscillation_count(flat) == 0);
    // cos on [0, 4pi] has interior extrema at pi, 2pi, 3pi
    for (int i = 0; i <= 4000; ++i) cosine[i] = std::cos(4.0 * std::numbers::pi * i / 4000.0);
    CHECK(oscillation_count(cosine) == 3);
    // noise below the tolerance does not count
    std::vector<double> jitter(200);
    for (int i = 0; i < 200; ++i) jitter[i] = 0.5 + (i % 2 ? 1e-9 : -1e-9);
    CHECK(oscillation_count(jitter) == 0);
}

TEST_CASE("config1 without photons matches the baseline when uncoupled")
{
    auto run = [](ScenarioConfig cfg) {
        cfg.t_max = 200.0;
        return integrate(assemble(validate_scenario(std::move(cfg))));
    };
    PhysParams p;
    p.kappa = 0.0;
    const TimeSeries base = run(build_baseline(1, p));
    const TimeSeries c1 = run(build_config1(1, 0, p));
    for (const char* name : {"atom0_P_S", "atom0_P_A", "atom0_P_B", "cav0_A_n", "cav0_B_n"}) {
        CAPTURE(name);
        const auto& x = base.channel(name);
        const auto& y = c1.channel(name);
        REQUIRE(x.size() == y.size());
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - y[i]) <= 1e-12);
    }

    // with a live link the empty donor cavity takes part in the dynamics
    const TimeSeries linked = run(build_config1(1, 0, PhysParams{}));
    const TimeSeries alone = run(build_baseline(1, PhysParams{}));
    CHECK(std::abs(linked.channel("atom0_P_A").back() - alone.channel("atom0_P_A").back()) > 1e-6);
}
