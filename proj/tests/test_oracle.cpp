#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavistim/dynamics.hpp"
#include "cavistim/oracle.hpp"

using namespace cavistim;
using namespace cavistim::oracle;

namespace {

OpenSystem system_for(ScenarioConfig cfg) { return assemble(validate_scenario(std::move(cfg))); }

}  // namespace

TEST_CASE("dense_propagate basics")
{
    const OpenSystem sys = system_for(build_config2(1, 1, PhysParams{}));
    const DensityMatrix rho0 = sys.initial_state();

    SUBCASE("t = 0 is the identity")
    {
        CHECK(dense_propagate(sys.hamiltonian, sys.jumps, rho0, 0.0) == rho0);
    }
    SUBCASE("composition")
    {
        const auto once = dense_propagate(sys.hamiltonian, sys.jumps, rho0, 7.0);
        const auto twice = dense_propagate(sys.hamiltonian, sys.jumps,
                                           dense_propagate(sys.hamiltonian, sys.jumps, rho0, 3.0), 4.0);
        CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("matches the integrator")
    {
        auto cfg = build_config2(1, 1, PhysParams{});
        cfg.step_size = 1e-3;
        cfg.t_max = 5.0;
        const OpenSystem s2 = system_for(cfg);
        const TimeSeries ts = integrate(s2);
        const auto exact = dense_propagate(s2.hamiltonian, s2.jumps, s2.initial_state(), 5.0);
        CHECK((ts.final_state - exact).cwiseAbs().maxCoeff() <= 1e-5);
    }
}

TEST_CASE("free evolution rotates coherences")
{
    const SparseHermitian h(2, {{0, 0, {0.5, 0.0}}, {1, 1, {2.0, 0.0}}});
    DensityMatrix rho(2, 2);
    rho << 0.5, 0.5, 0.5, 0.5;
    const double t = 1.3;
    const auto out = dense_propagate(h, {}, rho, t);
    CHECK(std::abs(out(0, 0) - 0.5) < 1e-12);
    CHECK(std::abs(out(1, 1) - 0.5) < 1e-12);
    const Complex phase = std::exp(Complex(0.0, -(0.5 - 2.0) * t));
    CHECK(std::abs(out(0, 1) - 0.5 * phase) < 1e-12);
}

TEST_CASE("pure decay through the dense oracle")
{
    const SparseHermitian h(2, {});
    JumpOperator a{1.0, 2, {{0, 1, {1.0, 0.0}}}, "out", 0};
    const auto out = dense_propagate(h, {a}, pure_state(2, 1), 1.0);
    CHECK(out(1, 1).real() == doctest::Approx(0.36788).epsilon(1e-5));
}

TEST_CASE("dimension limit")
{
    const SparseHermitian h(kMaxDenseDim + 1, {});
    CHECK_THROWS_AS(DenseLiouvillian(h, {}), DimensionTooLarge);
}

TEST_CASE("jc_population")
{
    CHECK(jc_population(0.1, 0, 0.0) == 1.0);
    CHECK(jc_population(0.1, 0, std::numbers::pi / 2 / 0.1) == doctest::Approx(0.0).epsilon(1e-12));
    // three photons halve the first-zero time
    const double t0 = std::numbers::pi / 2 / 0.1;
    CHECK(jc_population(0.1, 3, t0 / 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("permanent")
{
    CHECK(permanent(Eigen::MatrixXcd::Identity(4, 4)) == Complex(1.0, 0.0));
    CHECK(std::abs(permanent(Eigen::MatrixXcd::Ones(5, 5)) - 120.0) < 1e-9);
    Eigen::MatrixXcd m(2, 2);
    m << Complex(1, 1), 2, 3, Complex(0, -1);
    // per = ad + bc
    CHECK(std::abs(permanent(m) - (Complex(1, 1) * Complex(0, -1) + 6.0)) < 1e-12);
    Eigen::MatrixXcd r(3, 3);
    r << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    CHECK(std::abs(permanent(r) - 450.0) < 1e-9);
    CHECK(permanent(Eigen::MatrixXcd(0, 0)) == Complex(1.0, 0.0));
}

TEST_CASE("star transfer")
{
    for (double t : {0.0, 0.3, 1.1, 2.5}) {
        const double s = std::sin(0.7 * t);
        CHECK(star_transfer_probability(1, 0.7, t) == doctest::Approx(s * s).epsilon(1e-12));
    }
    CHECK(star_transfer_probability(3, 1.0, 0.0) == doctest::Approx(0.0));
    const double t_star = std::numbers::pi / (2.0 * std::sqrt(3.0));
    CHECK(star_transfer_probability(3, 1.0, t_star) == doctest::Approx(6.0 / 27.0).epsilon(1e-12));
    CHECK_THROWS_AS(star_transfer_probability(0, 1.0, 1.0), std::invalid_argument);

    const auto u = star_single_particle_propagator(3, 0.4, 2.0);
    CHECK((u * u.adjoint() - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("star scenario agrees with the oracle")
{
    auto cfg = build_star_scenario(1, 0.8, 1.0);
    cfg.step_size = 1e-4;
    cfg.record_stride = 100;
    cfg.t_max = 4.0;
    const TimeSeries ts = integrate(system_for(cfg));
    const auto& n0 = ts.channel("cav0_A_n");
    for (std::size_t i = 0; i < ts.times.size(); ++i) {
        CHECK(std::abs(n0[i] - star_transfer_probability(1, 0.8, ts.times[i])) <= 1e-6);
    }
}
