#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cavistim/dynamics.hpp"
#include "cavistim/io/csv.hpp"
#include "cavistim/io/grid.hpp"
#include "cavistim/io/manifest.hpp"
#include "cavistim/io/scenario_json.hpp"
#include "cavistim/io/svg_plot.hpp"

using namespace cavistim;
using namespace cavistim::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "cavistim_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CsvTable csv(const std::string& text)
{
    std::istringstream in(text);
    return parse_csv(in);
}

}  // namespace

TEST_CASE("grid syntax")
{
    CHECK(parse_grid("1:25:25").size() == 25);
    CHECK(parse_grid("1:25:25")[22] == doctest::Approx(23.0));
    CHECK(parse_grid("0.01:0.64:4") == std::vector<double>{0.01, 0.22, 0.43, 0.64});
    CHECK(parse_grid("0.05,0.2") == std::vector<double>{0.05, 0.2});
    CHECK(parse_grid(" 3 ") == std::vector<double>{3.0});
    const auto lg = parse_grid("log:0.01:1.28:8");
    REQUIRE(lg.size() == 8);
    CHECK(lg[1] == doctest::Approx(0.02));
    CHECK(lg[7] == 1.28);
    CHECK(parse_grid("2:2:1") == std::vector<double>{2.0});

    for (const char* bad : {"", "  ", "1:2", "1:2:0", "1:2:2.5", "a,b", "1,,2", "log:0:1:3", "log:1,2", "1:2:3:4"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_grid(bad), GridError);
    }
}

TEST_CASE("scenario JSON round trip")
{
    const auto cfg = build_config2(1, 2, PhysParams{});
    const auto j = scenario_to_json(cfg);
    const auto back = scenario_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back == cfg);

    const fs::path path = scratch("scenario.json");
    write_scenario(cfg, path);
    CHECK(read_scenario(path) == cfg);
}

TEST_CASE("scenario JSON errors")
{
    auto j = nlohmann::json::parse(scenario_to_json(build_baseline(1, PhysParams{})).dump());
    j["surprise"] = 1;
    j["cavities"][0]["modes"][0]["colour"] = "red";
    j["leaks"][0]["rate"] = "fast";
    try {
        scenario_from_json(j, "cfg.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("cfg.json") != std::string::npos);
        CHECK(msg.find("unknown key 'surprise'") != std::string::npos);
        CHECK(msg.find("unknown key 'colour'") != std::string::npos);
        CHECK(msg.find("leaks[0].rate: wrong type") != std::string::npos);
        CHECK(e.problems().size() == 3);
    }

    try {
        read_scenario("missing.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
    }

    const fs::path broken = scratch("broken.json");
    std::ofstream(broken) << "{ not json";
    CHECK_THROWS_AS(read_scenario(broken), ConfigError);
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5e-12) == "-2.4999999999999998e-12");
    CHECK(format_number(1e300) == "1.0000000000000001e+300");
    CHECK(format_number(0.0) == "0");
}

TEST_CASE("time series CSV")
{
    auto cfg = build_config2(1, 1, PhysParams{});
    cfg.t_max = 5.0;
    const TimeSeries ts = integrate(assemble(validate_scenario(cfg)));
    std::ostringstream os;
    write_timeseries_csv(os, ts);
    const std::string text = os.str();
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.rfind("t,atom0_P_S,atom0_P_A,atom0_P_B,atom1_P_S,atom1_P_A,cav0_A_n,cav0_B_n,cav1_A_n,"
                     "sink_sinkA_emitted,sink_sinkB_emitted,trace_err\n",
                     0) == 0);

    const CsvTable table = csv(text);
    CHECK(table.rows.size() == ts.times.size());
    const auto back = table.numeric_column("atom0_P_A");
    CHECK(back == ts.channel("atom0_P_A"));
    CHECK_THROWS_WITH_AS(table.numeric_column("nope"), "missing column 'nope'", CsvError);
}

TEST_CASE("config file round trip reproduces CSV bytes")
{
    auto cfg = build_config2(1, 1, PhysParams{});
    cfg.t_max = 20.0;
    const fs::path path = scratch("roundtrip.json");
    write_scenario(cfg, path);
    auto run = [](const ScenarioConfig& c) {
        std::ostringstream os;
        write_timeseries_csv(os, integrate(assemble(validate_scenario(c))));
        return os.str();
    };
    CHECK(run(cfg) == run(read_scenario(path)));
}

TEST_CASE("sweep and metrics CSV")
{
    SweepTable t;
    t.axes = {{"kappa", {0.1, 0.2}}, {"gamma", {0.05}}};
    SweepCell ok;
    ok.coords = {0.1, 0.05};
    ok.metrics = Metrics{};
    ok.metrics->crossing_time = 12.5;
    ok.metrics->asymptotic_difference = {0.25, true, 1e-4};
    ok.oscillations = 3;
    ok.t_max_used = 100;
    SweepCell bad;
    bad.coords = {0.2, 0.05};
    bad.error = "trace error, reduce h";
    t.cells = {ok, bad};
    std::ostringstream os;
    write_sweep_csv(os, t);
    CHECK(os.str() ==
          "kappa,gamma,crossing_time,asymptotic_diff,converged,oscillations,t_max_used,error\n"
          "0.10000000000000001,0.050000000000000003,12.5,0.25,1,3,100,\n"
          "0.20000000000000001,0.050000000000000003,,,,0,0,\"trace error, reduce h\"\n");
    const auto back = csv(os.str());
    CHECK(back.rows[1][7] == "trace error, reduce h");
    CHECK(std::isnan(back.numeric_column("crossing_time")[1]));

    std::ostringstream ms;
    Metrics m;
    m.asymptotic_difference = {-0.5, false, 0.2};
    m.sink_totals = {{"sinkA", 0.25}};
    write_metrics_csv(ms, m);
    CHECK(ms.str() == "key,value\ncrossing_time,\nasymptotic_diff,-0.5\nconverged,0\ndrift,0.20000000000000001\n"
                      "sink_sinkA_total,0.25\n");
}

TEST_CASE("SVG rendering")
{
    const std::string text = "t,P_S,P_A,P_B\n0,1,0,0\n1,0.5,0.3,0.2\n2,0.2,0.5,0.3\n";
    PlotSpec spec;
    const std::string a = render_svg(csv(text), spec);
    CHECK(a == render_svg(csv(text), spec));
    CHECK(a.find("width=\"960\" height=\"540\"") != std::string::npos);
    CHECK(a.find(">P_S<") != std::string::npos);
    CHECK(a.find(">P_A<") != std::string::npos);
    CHECK(a.find(">P_B<") != std::string::npos);
    CHECK(a.find("<path") != std::string::npos);

    SUBCASE("single row draws markers only")
    {
        const std::string one = render_svg(csv("t,P_A\n0,0.5\n"), spec);
        CHECK(one.find("<path") == std::string::npos);
        CHECK(one.find("<circle") != std::string::npos);
    }
    SUBCASE("missing x column is named")
    {
        CHECK_THROWS_WITH_AS(render_svg(csv("time,P_A\n0,1\n"), spec), "missing column 't'", CsvError);
    }
    SUBCASE("grouped series")
    {
        PlotSpec g;
        g.x = "kappa";
        g.y = {"crossing_time"};
        g.group_by = "gamma";
        const std::string s = render_svg(csv("kappa,gamma,crossing_time\n0.1,1,5\n0.1,2,6\n0.2,1,4\n0.2,2,\n"), g);
        CHECK(s.find(">gamma=1<") != std::string::npos);
        CHECK(s.find(">gamma=2<") != std::string::npos);
    }
    SUBCASE("render_plot writes next to the CSV")
    {
        const fs::path p = scratch("plot_input.csv");
        std::ofstream(p, std::ios::binary) << text;
        const fs::path out = render_plot(p, spec);
        CHECK(out.extension() == ".svg");
        CHECK(slurp(out) == a);
    }
}

TEST_CASE("manifest")
{
    RunManifest m;
    m.command = "simulate";
    m.source = "config2";
    m.parameters = parameter_map(PhysParams{});
    m.config_digest = scenario_digest(build_config2(1, 1, PhysParams{}));
    const fs::path p = scratch("manifest.json");
    write_manifest(m, p);
    const auto j = nlohmann::json::parse(slurp(p));
    CHECK(j["config_digest"] == m.config_digest);
    CHECK(j["parameters"]["kappa"] == PhysParams{}.kappa);
    CHECK(j["tool_version"] == kToolVersion);
}
