#include <doctest.h>

#include <cstdlib>

#include "cavistim/sweep.hpp"

using namespace cavistim;

namespace {

ScenarioConfig short_config2()
{
    auto cfg = build_config2(1, 1, PhysParams{});
    cfg.t_max = 100.0;
    return cfg;
}

SweepOptions no_extension(int threads = 1)
{
    SweepOptions so;
    so.threads = threads;
    so.max_extension = 1.0;
    return so;
}

}  // namespace

TEST_CASE("detect_saturation on columns")
{
    const std::vector<double> grid{0.1, 0.2, 0.4, 0.8};
    using Col = std::vector<std::optional<double>>;
    CHECK_FALSE(detect_saturation(grid, Col{10, 8, 6, 4}).has_value());
    CHECK(detect_saturation(grid, Col{5, 5, 5, 5}) == 0.1);
    CHECK(detect_saturation(grid, Col{10, 6, 5.8, 5.75}) == 0.4);
    CHECK_FALSE(detect_saturation(grid, Col{10, 6, std::nullopt, 5.75}).has_value());
    CHECK(detect_saturation(grid, Col{std::nullopt, 6, 5.8, 5.75}) == 0.4);
    CHECK_FALSE(detect_saturation(grid, Col{10, 6, 5.8, std::nullopt}).has_value());
    CHECK_THROWS_AS(detect_saturation(grid, Col{1, 2}), std::invalid_argument);
}

TEST_CASE("with_intensities preserves leak ratios")
{
    PhysParams p;
    p.gamma_a = 0.1;
    p.gamma_b = 0.02;
    const auto cfg = with_intensities(build_config2(1, 1, p), 0.7, 0.4);
    CHECK(cfg.links[0].strength == 0.7);
    CHECK(cfg.leaks[0].rate == doctest::Approx(0.4));
    CHECK(cfg.leaks[1].rate == doctest::Approx(0.08));
}

TEST_CASE("1x1 intensity sweep equals a direct cell")
{
    const auto base = short_config2();
    const auto table = run_intensity_sweep(base, {0.2}, {0.1}, no_extension());
    REQUIRE(table.cells.size() == 1);
    const auto direct = evaluate_cell(with_intensities(base, 0.2, 0.1), no_extension());
    REQUIRE(table.cells[0].ok());
    CHECK(table.cells[0].metrics->asymptotic_difference.value == direct.metrics->asymptotic_difference.value);
    CHECK(table.cells[0].oscillations == direct.oscillations);
    CHECK(table.cells[0].coords == std::vector<double>{0.2, 0.1});
    CHECK(table.base_digest == scenario_digest(base));
}

TEST_CASE("frequency sweep layout and preconditions")
{
    const auto base = short_config2();
    const auto table = run_frequency_sweep(base, {1.0, 2.0, 4.0}, no_extension());
    CHECK(table.axes.size() == 1);
    CHECK(table.axes[0].name == "ratio");
    CHECK(table.cells.size() == 3);
    for (const auto& c : table.cells) CHECK(c.ok());
    CHECK(table.at(2).coords[0] == 4.0);

    CHECK_THROWS_AS(run_frequency_sweep(base, {0.5, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(run_frequency_sweep(base, {2.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(run_frequency_sweep(base, {}), std::invalid_argument);
    CHECK_THROWS_AS(run_intensity_sweep(base, {0.0}, {0.1}), std::invalid_argument);
}

TEST_CASE("failed cells keep the sweep alive")
{
    ::setenv("CAVISTIM_DIM_CAP", "5", 1);
    const auto table = run_intensity_sweep(short_config2(), {0.1, 0.2}, {0.1}, no_extension());
    ::unsetenv("CAVISTIM_DIM_CAP");
    REQUIRE(table.cells.size() == 2);
    for (const auto& c : table.cells) {
        CHECK_FALSE(c.ok());
        CHECK(c.error.find("dimension") != std::string::npos);
        CHECK_FALSE(c.metrics.has_value());
    }
}

TEST_CASE("parallel sweep reproduces serial cells")
{
    const auto base = short_config2();
    const std::vector<double> kappas{0.05, 0.1, 0.2};
    const std::vector<double> gammas{0.05, 0.1};
    const auto serial = run_intensity_sweep(base, kappas, gammas, no_extension(1));
    const auto again = run_intensity_sweep(base, kappas, gammas, no_extension(1));
    const auto parallel = run_intensity_sweep(base, kappas, gammas, no_extension(4));
    REQUIRE(serial.cells.size() == 6);
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        const auto& a = *serial.cells[i].metrics;
        CHECK(a.asymptotic_difference.value == again.cells[i].metrics->asymptotic_difference.value);
        CHECK(std::abs(a.asymptotic_difference.value - parallel.cells[i].metrics->asymptotic_difference.value) <=
              1e-12);
        CHECK(serial.cells[i].oscillations == parallel.cells[i].oscillations);
        CHECK(serial.cells[i].coords == parallel.cells[i].coords);
    }
}

TEST_CASE("t_max extension")
{
    auto base = short_config2();
    base.t_max = 10.0;
    SweepOptions so;
    so.max_extension = 4.0;
    const auto cell = evaluate_cell(base, so);
    REQUIRE(cell.ok());
    // an unconverged plateau keeps doubling up to the cap
    if (!cell.metrics->asymptotic_difference.converged) CHECK(cell.t_max_used == doctest::Approx(40.0));
    CHECK(cell.t_max_used <= 40.0 + 1e-9);
}
