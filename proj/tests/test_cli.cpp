#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvcm/cli/presets.hpp"

using namespace cvcm;
using namespace cvcm::cli;

namespace {

const char* const valid_config = R"({
  "system": {"frequency": 1, "temperature": 1},
  "unit": {"size": 4, "frequency": 1, "internal_coupling": 0.67, "temperature": 1},
  "coupling": {"kind": "beamsplitter", "strength": "rescaled", "mode": "max", "value": 0.5},
  "dt": 0.01,
  "steps": 200,
  "mode": "exact"
})";

std::string where_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.where();
    }
    return "no error";
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto p = text.find(from);
    REQUIRE(p != std::string::npos);
    return text.replace(p, from.size(), to);
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("cvcm_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("valid config") {
    const RunConfig cfg = parse_config(valid_config);
    const auto& s = cfg.scenario;
    CHECK(s.unit.size == 4);
    CHECK(s.unit.internal_coupling == 0.67);
    CHECK(s.coupling.kind == CouplingKind::Beamsplitter);
    CHECK(s.coupling.semantics == StrengthSemantics::Rescaled);
    CHECK(std::get<ModeSelector>(s.coupling.weights).mode == 3);
    CHECK(std::get<ModeSelector>(s.coupling.weights).strength == 0.5);
    CHECK(s.mode == PropagationMode::ExactStep);
    CHECK_FALSE(s.drain.has_value());
    CHECK(cfg.effective_record_every() == 1);
    CHECK(validation_report(cfg).empty());
}

TEST_CASE("site weights, drain and continuous mode") {
    const std::string text = R"({
      "system": {"frequency": 1, "temperature": 1},
      "unit": {"size": 4, "frequency": 1, "internal_coupling": 0.2, "temperature": 1},
      "coupling": {"kind": "spring", "strength": "rescaled", "weights": [0.5, -0.5, 0.5, -0.5]},
      "drain": {"frequency": 1, "temperature": 1, "rate": 0.5},
      "dt": 0.01, "steps": 100000, "mode": "continuous"
    })";
    const RunConfig cfg = parse_config(text);
    CHECK(std::get<SiteWeights>(cfg.scenario.coupling.weights).values.size() == 4);
    REQUIRE(cfg.scenario.drain.has_value());
    CHECK(cfg.scenario.drain->rate == 0.5);
    // 1e6 RK4 steps at h = 1e-3 over t = 1000.
    CHECK(cfg.effective_record_every() == 100);
    CHECK(validation_report(cfg).empty());
}

TEST_CASE("config errors name the offending field") {
    CHECK(where_of(replace(valid_config, R"("size": 4)", R"("size": "four")")) == "/unit/size");
    CHECK(where_of(replace(valid_config, R"("kind": "beamsplitter")", R"("kind": "magnet")")) ==
          "/coupling/kind");
    CHECK(where_of(replace(valid_config, R"("dt": 0.01)", R"("dt": -1)")) == "/dt");
    CHECK(where_of(replace(valid_config, R"("dt": 0.01,)", "")) == "/dt");
    CHECK(where_of(replace(valid_config, R"("mode": "exact")", R"("mode": "magic")")) == "/mode");
    CHECK(where_of(replace(valid_config, R"("steps": 200)", R"("steps": 200, "colour": 1)")) ==
          "/colour");
    CHECK(where_of(replace(valid_config, R"("mode": "max")", R"("mode": 2.5)")) == "/coupling/mode");
    CHECK(where_of(replace(valid_config, R"("mode": "max", "value": 0.5)", R"("weights": [1, 2])")) ==
          "/coupling/weights");
}

TEST_CASE("syntax errors report line and column") {
    const std::string broken = replace(valid_config, R"("dt": 0.01,)", R"("dt": 0.01,,)");
    const std::string where = where_of(broken);
    CHECK(where == "line 5, column 14");
}

TEST_CASE("presets in config files") {
    const RunConfig cfg = parse_config(R"({"preset": "fig4", "record_every": 100})");
    CHECK(cfg.scenario.mode == PropagationMode::DiscreteRecursion);
    CHECK(cfg.scenario.steps == 10000);
    CHECK(cfg.effective_record_every() == 100);
    CHECK(where_of(R"({"preset": "fig4", "dt": 0.1})") == "/dt");
    CHECK(where_of(R"({"preset": "fig9"})") == "/preset");
    CHECK(where_of(R"({"preset": "fig2"})") == "/preset");
}

TEST_CASE("sweep specifications") {
    const SweepSpec s = parse_sweep("unit.internal_coupling=-0.1:2:8");
    CHECK(s.parameter == "unit.internal_coupling");
    CHECK(s.count == 8);
    const auto v = s.values();
    CHECK(v.front() == -0.1);
    CHECK(v.back() == 2.0);
    CHECK(v[1] == doctest::Approx(0.2));
    CHECK_THROWS_AS(parse_sweep("unit.size=2:4:3"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("dt=0.1:0.2"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("dt=a:0.2:3"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("dt=0.1:0.2:0"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("=0.1:0.2:3"), ConfigError);
}

TEST_CASE("number formatting is exact and locale free") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5e-20) == "-2.4999999999999999e-20");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -1e-300})
        CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("validation reports without propagating") {
    RunConfig cfg = parse_config(valid_config);
    cfg.scenario.unit.internal_coupling = -0.3;
    const auto unstable = validation_report(cfg);
    REQUIRE_FALSE(unstable.empty());
    CHECK(unstable.front().find("unstable ring") != std::string::npos);

    cfg = parse_config(valid_config);
    cfg.scenario.coupling = {CouplingKind::Spring, StrengthSemantics::Rescaled, ModeSelector{1, 0.5}};
    cfg.scenario.mode = PropagationMode::ContinuousODE;
    const auto diverging = validation_report(cfg);
    REQUIRE(diverging.size() == 1);
    CHECK(diverging.front().find("sum to zero") != std::string::npos);

    cfg.scenario.coupling.weights = ModeSelector{3, 0.5};
    cfg.scenario.drain = DrainSpec{1.0, 1.0, 0.0};
    const auto no_steady = validation_report(cfg);
    REQUIRE(no_steady.size() == 1);
    CHECK(no_steady.front().find("Hurwitz") != std::string::npos);

    for (const char* p : {"fig4", "fig5", "fig6"}) {
        RunConfig preset;
        preset.scenario = preset_scenario(p);
        CHECK(validation_report(preset).empty());
    }

    cfg = parse_config(valid_config);
    cfg.sweep = parse_sweep("unit.internal_coupling=-0.5:1:4");
    CHECK(validation_report(cfg).size() == 1);
}

TEST_CASE("CSV output is deterministic") {
    RunConfig cfg = parse_config(valid_config);
    std::ostringstream a, b, la, lb;
    const RunResult r1 = run_scenario(cfg.scenario, 10);
    const RunResult r2 = run_scenario(cfg.scenario, 10);
    write_trajectory_csv(a, r1.trajectory);
    write_trajectory_csv(b, r2.trajectory);
    write_ledger_csv(la, r1.trajectory);
    write_ledger_csv(lb, r2.trajectory);
    CHECK(a.str() == b.str());
    CHECK(la.str() == lb.str());
    CHECK(a.str().rfind("t,sxx,sxp,spp,energy\n", 0) == 0);
    CHECK(la.str().rfind("t,dU,dQ,dW,S,Sigma\n", 0) == 0);
    // Header plus t = 0 plus every tenth of 200 steps.
    const std::string csv = a.str();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
}

TEST_CASE("run writes trajectory, ledger and summary") {
    const auto dir = scratch("run");
    RunConfig cfg = parse_config(valid_config);
    cfg.outputs.trajectory = (dir / "t.csv").string();
    cfg.outputs.ledger = (dir / "l.csv").string();
    cfg.outputs.summary = (dir / "s.json").string();
    CHECK(execute(cfg) == exit_ok);
    const std::string summary = slurp(dir / "s.json");
    CHECK(summary.find("\"first_law\": \"pass\"") != std::string::npos);
    CHECK(summary.find("\"steady_energy\"") != std::string::npos);
    CHECK(summary.find("\"steady_work_rate\"") != std::string::npos);
    CHECK(std::filesystem::file_size(dir / "t.csv") > 100);
    CHECK(std::filesystem::file_size(dir / "l.csv") > 100);
}

TEST_CASE("sweep rows come back in parameter order") {
    RunConfig cfg = parse_config(valid_config);
    cfg.scenario.steps = 20;
    const SweepSpec sweep = parse_sweep("unit.internal_coupling=0:1.5:7");
    const auto rows = run_sweep(cfg.scenario, sweep, 1);
    REQUIRE(rows.size() == 7);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].value == sweep.values()[k]);
        CollisionScenario s = cfg.scenario;
        apply_parameter(s, sweep.parameter, sweep.values()[k]);
        const RunResult serial = run_scenario(s, 1);
        CHECK(rows[k].result.trajectory.points.back().thermo.energy ==
              serial.trajectory.points.back().thermo.energy);
    }
    std::ostringstream a, b;
    write_sweep_csv(a, sweep.parameter, rows);
    write_sweep_csv(b, sweep.parameter, run_sweep(cfg.scenario, sweep, 1));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("unit.internal_coupling,final_energy,", 0) == 0);
}

TEST_CASE("preset fig2 writes three decreasing temperature curves") {
    const auto dir = scratch("fig2");
    CHECK(run_preset("fig2", dir) == exit_ok);
    std::ifstream in(dir / "fig2_effective_temperature.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "lambda,T_eff_N3,T_eff_N4,T_eff_N5");
    long rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 200);
    CHECK_THROWS_AS(run_preset("fig9", dir), ConfigError);
}
