#include "cvcm/cli/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <future>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cvcm/effective.hpp"

namespace cvcm::cli {

using nlohmann::ordered_json;

namespace {

const char* mode_name(PropagationMode m) {
    switch (m) {
    case PropagationMode::ExactStep: return "exact";
    case PropagationMode::SuperoperatorStep: return "superoperator";
    case PropagationMode::DiscreteRecursion: return "discrete_recursion";
    case PropagationMode::ContinuousODE: return "continuous";
    }
    return "?";
}

// JSON has no NaN or infinity; those become null.
ordered_json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

ordered_json matrix_json(const Matrix2& m) {
    return ordered_json{{"sxx", number(m(0, 0))}, {"sxp", number(m(0, 1))}, {"spp", number(m(1, 1))}};
}

ordered_json scenario_json(const CollisionScenario& s) {
    ordered_json j;
    j["system"] = {{"frequency", s.system.frequency}, {"temperature", s.system.temperature}};
    j["unit"] = {{"size", s.unit.size},
                 {"frequency", s.unit.frequency},
                 {"internal_coupling", s.unit.internal_coupling},
                 {"temperature", s.unit.temperature},
                 {"force_ring", s.unit.force_ring}};
    ordered_json c;
    c["kind"] = s.coupling.kind == CouplingKind::Spring ? "spring" : "beamsplitter";
    c["strength"] = s.coupling.semantics == StrengthSemantics::Rescaled ? "rescaled" : "raw";
    if (const auto* sel = std::get_if<ModeSelector>(&s.coupling.weights)) {
        c["mode"] = sel->mode;
        c["value"] = sel->strength;
    } else {
        c["weights"] = std::get<SiteWeights>(s.coupling.weights).values;
    }
    j["coupling"] = c;
    j["dt"] = s.dt;
    j["steps"] = s.steps;
    j["mode"] = mode_name(s.mode);
    if (s.mode == PropagationMode::ContinuousODE) j["ode_step"] = s.integration_step();
    if (s.drain)
        j["drain"] = {{"frequency", s.drain->frequency},
                      {"temperature", s.drain->temperature},
                      {"rate", s.drain->rate}};
    return j;
}

CollisionScenario continuous_version(const CollisionScenario& s) {
    CollisionScenario c = s;
    c.mode = PropagationMode::ContinuousODE;
    return c;
}

bool single_mode(const Vector& rates, Eigen::Index& which) {
    const double scale = rates.cwiseAbs().maxCoeff();
    long count = 0;
    for (Eigen::Index k = 0; k < rates.size(); ++k)
        if (std::abs(rates(k)) > 1e-12 * scale) {
            which = k;
            ++count;
        }
    return count == 1;
}

} // namespace

LawVerdict judge(const LawSummary& laws) {
    LawVerdict v;
    v.max_first_law_residual = laws.max_first_law_residual;
    v.min_entropy_production = laws.steps > 0 ? laws.min_entropy_production : 0.0;
    return v;
}

std::optional<SteadyState> analyse_steady_state(const CollisionScenario& s) {
    if (s.coupling.semantics != StrengthSemantics::Rescaled) return std::nullopt;
    const CollisionScenario c = continuous_version(s);
    if (!scenario_violations(c).empty()) return std::nullopt;
    const LyapunovSystem sys = build_lyapunov(c);
    if (!is_hurwitz(sys.drift)) return std::nullopt;

    SteadyState out;
    out.sigma = solve_steady_state(sys);
    out.energy = system_energy(out.sigma, s.system.frequency);
    out.rates = continuous_rates(out.sigma, make_rate_model(c));

    const Vector rates = rescaled_mode_rates(c.coupling, c.unit);
    const Vector freqs = unit_normal_modes(c.unit).frequencies;
    if (c.coupling.kind == CouplingKind::Beamsplitter && !c.drain) {
        try {
            const EffectiveSqueezedBath b =
                effective_bath(rates, freqs, c.unit.frequency, c.unit.temperature);
            out.deltas.push_back({"steady_energy",
                                  steady_state_energy_bs(b.r, b.temperature, c.system.frequency,
                                                         c.unit.frequency),
                                  out.energy});
            Eigen::Index m = 0;
            if (single_mode(rates, m))
                out.deltas.push_back({"steady_work_rate",
                                      steady_state_work_bs(rates(m), c.system.frequency,
                                                           c.unit.frequency, freqs(m),
                                                           c.unit.temperature),
                                      out.rates.work});
        } catch (const ModelError& e) {
            spdlog::warn("no effective bath for this scenario: {}", e.what());
        }
    }
    if (c.coupling.kind == CouplingKind::Spring && c.drain) {
        out.deltas.push_back({"steady_energy",
                              drain_steady_state_energy(rates, freqs, c.unit.temperature,
                                                        c.drain->rate, c.system.frequency,
                                                        c.drain->frequency,
                                                        c.drain->temperature),
                              out.energy});
    }
    return out;
}

RunResult run_scenario(const CollisionScenario& s, long record_every) {
    RunResult r;
    r.trajectory = simulate(s, record_every);
    r.verdict = judge(r.trajectory.laws);
    r.steady = analyse_steady_state(s);
    return r;
}

std::vector<std::string> validation_report(const RunConfig& cfg) {
    const CollisionScenario& s = cfg.scenario;
    std::vector<std::string> out = scenario_violations(s);
    if (!out.empty()) return out;

    if (s.coupling.semantics == StrengthSemantics::Rescaled &&
        s.coupling.kind == CouplingKind::Beamsplitter && !s.drain) {
        try {
            effective_bath(rescaled_mode_rates(s.coupling, s.unit),
                           unit_normal_modes(s.unit).frequencies, s.unit.frequency,
                           s.unit.temperature);
        } catch (const std::exception& e) {
            out.emplace_back(std::string("effective bath: ") + e.what());
        }
    }
    const bool steady_expected =
        s.mode == PropagationMode::ContinuousODE &&
        (s.coupling.kind == CouplingKind::Beamsplitter || s.drain.has_value());
    if (steady_expected) {
        try {
            const LyapunovSystem sys = build_lyapunov(s);
            if (!is_hurwitz(sys.drift))
                out.emplace_back("drift is not Hurwitz: no steady state exists");
        } catch (const std::exception& e) {
            out.emplace_back(e.what());
        }
    }
    if (cfg.sweep) {
        for (double v : cfg.sweep->values()) {
            CollisionScenario p = s;
            try {
                apply_parameter(p, cfg.sweep->parameter, v);
            } catch (const std::exception& e) {
                out.emplace_back(e.what());
                break;
            }
            for (const auto& msg : scenario_violations(p))
                out.push_back(cfg.sweep->parameter + " = " + format_number(v) + ": " + msg);
        }
    }
    return out;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
    out << "t,sxx,sxp,spp,energy\n";
    for (const auto& p : tr.points)
        out << format_number(p.t) << ',' << format_number(p.sigma(0, 0)) << ','
            << format_number(p.sigma(0, 1)) << ',' << format_number(p.sigma(1, 1)) << ','
            << format_number(p.thermo.energy) << '\n';
}

void write_ledger_csv(std::ostream& out, const Trajectory& tr) {
    out << "t,dU,dQ,dW,S,Sigma\n";
    for (const auto& p : tr.points) {
        const ThermoRecord& r = p.thermo;
        out << format_number(r.t) << ',' << format_number(r.internal_energy) << ','
            << format_number(r.heat + r.drain_heat) << ',' << format_number(r.work) << ','
            << format_number(r.entropy) << ',' << format_number(r.entropy_production) << '\n';
    }
}

void write_summary(std::ostream& out, const CollisionScenario& s, const RunResult& r) {
    ordered_json j;
    j["scenario"] = scenario_json(s);
    const auto& tr = r.trajectory;
    const auto& last = tr.points.back();
    j["final"] = {{"t", last.t}, {"energy", number(last.thermo.energy)},
                  {"entropy", number(last.thermo.entropy)}, {"sigma", matrix_json(last.sigma)}};
    j["laws"] = {{"evaluated", tr.laws.steps},
                 {"rates", tr.continuous},
                 {"max_first_law_residual", number(r.verdict.max_first_law_residual)},
                 {"first_law_tolerance", first_law_tolerance},
                 {"first_law", r.verdict.first_law() ? "pass" : "fail"},
                 {"min_entropy_production", number(r.verdict.min_entropy_production)},
                 {"second_law_tolerance", second_law_tolerance},
                 {"second_law", r.verdict.second_law() ? "pass" : "fail"},
                 {"min_uncertainty_margin", number(tr.laws.min_uncertainty_margin)}};
    if (r.steady) {
        const SteadyState& ss = *r.steady;
        ordered_json st;
        st["energy"] = number(ss.energy);
        st["sigma"] = matrix_json(ss.sigma);
        st["dU"] = number(ss.rates.internal_energy);
        st["dQ"] = number(ss.rates.heat + ss.rates.drain_heat);
        st["dW"] = number(ss.rates.work);
        st["final_energy_minus_steady"] = number(last.thermo.energy - ss.energy);
        ordered_json deltas = ordered_json::array();
        for (const auto& d : ss.deltas)
            deltas.push_back({{"quantity", d.quantity},
                              {"analytic", number(d.analytic)},
                              {"numeric", number(d.numeric)},
                              {"delta", number(d.delta())}});
        st["analytic"] = deltas;
        j["steady_state"] = st;
    } else {
        j["steady_state"] = nullptr;
    }
    out << j.dump(2) << '\n';
}

std::vector<SweepRow> run_sweep(const CollisionScenario& base, const SweepSpec& sweep,
                                long record_every) {
    const std::vector<double> values = sweep.values();
    std::vector<SweepRow> rows(values.size());
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t first = 0; first < values.size(); first += workers) {
        const std::size_t last = std::min(values.size(), first + workers);
        std::vector<std::future<RunResult>> batch;
        for (std::size_t k = first; k < last; ++k) {
            CollisionScenario s = base;
            apply_parameter(s, sweep.parameter, values[k]);
            batch.push_back(std::async(std::launch::async, [s, record_every] {
                return run_scenario(s, record_every);
            }));
        }
        for (std::size_t k = first; k < last; ++k) {
            rows[k].value = values[k];
            rows[k].result = batch[k - first].get();
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::string& parameter,
                     const std::vector<SweepRow>& rows) {
    out << parameter
        << ",final_energy,steady_energy,analytic_steady_energy,dU,dQ,dW,max_first_law_residual,"
           "min_Sigma\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : rows) {
        const auto& r = row.result;
        const ThermoRecord& last = r.trajectory.points.back().thermo;
        double steady = nan;
        double analytic = nan;
        double du = last.internal_energy;
        double dq = last.heat + last.drain_heat;
        double dw = last.work;
        if (r.steady) {
            steady = r.steady->energy;
            for (const auto& d : r.steady->deltas)
                if (d.quantity == "steady_energy") analytic = d.analytic;
            du = r.steady->rates.internal_energy;
            dq = r.steady->rates.heat + r.steady->rates.drain_heat;
            dw = r.steady->rates.work;
        }
        out << format_number(row.value) << ',' << format_number(last.energy) << ','
            << format_number(steady) << ',' << format_number(analytic) << ','
            << format_number(du) << ',' << format_number(dq) << ',' << format_number(dw) << ','
            << format_number(r.verdict.max_first_law_residual) << ','
            << format_number(r.verdict.min_entropy_production) << '\n';
    }
}

namespace {

void write_file(const std::string& path, const auto& writer) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw ConfigError(path, "cannot open output file");
    writer(out);
    if (!out) throw ConfigError(path, "write failed");
    spdlog::info("wrote {}", path);
}

} // namespace

int execute(const RunConfig& cfg) {
    const long every = cfg.effective_record_every();
    if (cfg.sweep) {
        spdlog::info("sweeping {} over {} points", cfg.sweep->parameter, cfg.sweep->count);
        const auto rows = run_sweep(cfg.scenario, *cfg.sweep, every);
        if (cfg.outputs.sweep.empty())
            write_sweep_csv(std::cout, cfg.sweep->parameter, rows);
        else
            write_file(cfg.outputs.sweep,
                       [&](std::ostream& o) { write_sweep_csv(o, cfg.sweep->parameter, rows); });
        bool ok = true;
        for (const auto& row : rows) {
            if (!row.result.verdict.ok()) {
                spdlog::error("{} = {}: law check failed (residual {}, min Sigma {})",
                              cfg.sweep->parameter, format_number(row.value),
                              row.result.verdict.max_first_law_residual,
                              row.result.verdict.min_entropy_production);
                ok = false;
            }
        }
        return ok ? exit_ok : exit_law_violation;
    }

    spdlog::info("running {} steps in {} mode", cfg.scenario.steps, mode_name(cfg.scenario.mode));
    const RunResult r = run_scenario(cfg.scenario, every);
    write_file(cfg.outputs.trajectory, [&](std::ostream& o) { write_trajectory_csv(o, r.trajectory); });
    write_file(cfg.outputs.ledger, [&](std::ostream& o) { write_ledger_csv(o, r.trajectory); });
    write_file(cfg.outputs.summary, [&](std::ostream& o) { write_summary(o, cfg.scenario, r); });
    if (!r.verdict.ok()) {
        spdlog::error("law check failed: first-law residual {} (tol {}), min Sigma {} (tol -{})",
                      r.verdict.max_first_law_residual, first_law_tolerance,
                      r.verdict.min_entropy_production, second_law_tolerance);
        return exit_law_violation;
    }
    return exit_ok;
}

} // namespace cvcm::cli
