#include "cvcm/cli/presets.hpp"

#include <fstream>
#include <limits>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cvcm/effective.hpp"

namespace cvcm::cli {

namespace fs = std::filesystem;

namespace {

std::vector<double> grid(double from, double to, long count) {
    SweepSpec s{"", from, to, count};
    return s.values();
}

std::ofstream open(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path.string(), "cannot open output file");
    return out;
}

SteadyRow steady_row(const CollisionScenario& s, double coupling) {
    const auto st = analyse_steady_state(s);
    if (!st) throw NumericalError("no steady state at lambda_I = " + format_number(coupling));
    SteadyRow row;
    row.coupling = coupling;
    row.energy = st->energy;
    row.work = st->rates.work;
    row.heat = st->rates.heat + st->rates.drain_heat;
    row.analytic_energy = std::numeric_limits<double>::quiet_NaN();
    row.analytic_work = std::numeric_limits<double>::quiet_NaN();
    for (const auto& d : st->deltas) {
        if (d.quantity == "steady_energy") row.analytic_energy = d.analytic;
        if (d.quantity == "steady_work_rate") row.analytic_work = d.analytic;
    }
    return row;
}

void write_steady_rows(std::ostream& out, const std::vector<SteadyRow>& rows, double reference,
                       const char* reference_name) {
    out << "lambda,energy,analytic_energy," << reference_name << ",dW,analytic_dW,dQ\n";
    for (const auto& r : rows)
        out << format_number(r.coupling) << ',' << format_number(r.energy) << ','
            << format_number(r.analytic_energy) << ',' << format_number(reference) << ','
            << format_number(r.work) << ',' << format_number(r.analytic_work) << ','
            << format_number(r.heat) << '\n';
}

int dynamics(const CollisionScenario& s, const fs::path& dir, const std::string& stem) {
    RunConfig cfg;
    cfg.scenario = s;
    cfg.outputs.trajectory = (dir / (stem + "_trajectory.csv")).string();
    cfg.outputs.ledger = (dir / (stem + "_ledger.csv")).string();
    cfg.outputs.summary = (dir / (stem + "_summary.json")).string();
    return execute(cfg);
}

int fig2(const fs::path& dir) {
    const auto curves = effective_temperature_curves();
    auto out = open(dir / "fig2_effective_temperature.csv");
    out << "lambda";
    for (const auto& c : curves) out << ",T_eff_N" << c.unit_size;
    out << '\n';
    for (std::size_t k = 0; k < curves.front().coupling.size(); ++k) {
        out << format_number(curves.front().coupling[k]);
        for (const auto& c : curves) out << ',' << format_number(c.temperature[k]);
        out << '\n';
    }
    return exit_ok;
}

int fig3(const fs::path& dir) {
    const auto rows = beamsplitter_steady_rows(-0.1, 2.0, 200);
    const double eq = equilibrium_energy(1.0, 1.0, 1.0);
    {
        auto out = open(dir / "fig3_steady_state.csv");
        write_steady_rows(out, rows, eq, "E_eq");
    }
    nlohmann::ordered_json j;
    j["E_eq"] = eq;
    j["lambda_IC"] = critical_coupling(1.0, 1.0, 1.0, 0.5, 4);
    auto out = open(dir / "fig3_summary.json");
    out << j.dump(2) << '\n';
    return exit_ok;
}

int fig6(const fs::path& dir) {
    const auto rows = drain_steady_rows(-0.05, 2.0, 200);
    {
        auto out = open(dir / "fig6_drain_steady_state.csv");
        write_steady_rows(out, rows, equilibrium_energy(1.0, 1.0, 1.0), "initial_energy");
    }
    return dynamics(preset_scenario("fig6"), dir, "fig6_spring");
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig2", "fig3", "fig4", "fig5", "fig6"};
    return names;
}

std::vector<TemperatureCurve> effective_temperature_curves() {
    std::vector<TemperatureCurve> out;
    for (int n : {3, 4, 5}) {
        TemperatureCurve c;
        c.unit_size = n;
        c.coupling = grid(-0.1, 2.0, 200);
        const CouplingSpec coupling{CouplingKind::Beamsplitter, StrengthSemantics::Rescaled,
                                    ModeSelector{max_mode_index(n), 0.5}};
        for (double lam : c.coupling) {
            const RingUnitSpec unit{n, 1.0, lam, 1.0, false};
            const EffectiveSqueezedBath b =
                effective_bath(rescaled_mode_rates(coupling, unit),
                               unit_normal_modes(unit).frequencies, unit.frequency,
                               unit.temperature);
            c.temperature.push_back(b.temperature);
        }
        out.push_back(std::move(c));
    }
    return out;
}

CollisionScenario beamsplitter_steady_scenario(double coupling) {
    CollisionScenario s;
    s.system = {1.0, 1.0};
    s.unit = {4, 1.0, coupling, 1.0, false};
    s.coupling = {CouplingKind::Beamsplitter, StrengthSemantics::Rescaled,
                  ModeSelector{max_mode_index(4), 0.5}};
    s.dt = 0.01;
    s.steps = 1000;
    s.mode = PropagationMode::ContinuousODE;
    return s;
}

std::vector<SteadyRow> beamsplitter_steady_rows(double from, double to, long count) {
    std::vector<SteadyRow> rows;
    for (double lam : grid(from, to, count))
        rows.push_back(steady_row(beamsplitter_steady_scenario(lam), lam));
    return rows;
}

CollisionScenario drain_steady_scenario(double coupling) {
    CollisionScenario s;
    s.system = {1.0, 1.0};
    s.unit = {4, 1.0, coupling, 1.0, false};
    s.coupling = {CouplingKind::Spring, StrengthSemantics::Rescaled,
                  ModeSelector{max_mode_index(4), 0.5}};
    s.drain = DrainSpec{1.0, 1.0, 0.5};
    s.dt = 0.01;
    s.steps = 1000;
    s.mode = PropagationMode::ContinuousODE;
    return s;
}

std::vector<SteadyRow> drain_steady_rows(double from, double to, long count) {
    std::vector<SteadyRow> rows;
    for (double lam : grid(from, to, count))
        rows.push_back(steady_row(drain_steady_scenario(lam), lam));
    return rows;
}

int run_preset(std::string_view name, const fs::path& dir) {
    fs::create_directories(dir);
    spdlog::info("preset {} -> {}", name, dir.string());
    if (name == "fig2") return fig2(dir);
    if (name == "fig3") return fig3(dir);
    if (name == "fig4" || name == "fig5") return dynamics(preset_scenario(name), dir, std::string(name));
    if (name == "fig6") return fig6(dir);
    throw ConfigError("preset", "unknown preset \"" + std::string(name) + "\"");
}

} // namespace cvcm::cli
