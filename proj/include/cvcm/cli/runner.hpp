#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvcm/cli/config.hpp"
#include "cvcm/simulation.hpp"

namespace cvcm::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_law_violation = 2,
    exit_numerical = 3,
};

inline constexpr double first_law_tolerance = 1e-12;
inline constexpr double second_law_tolerance = 1e-8;

struct LawVerdict {
    double max_first_law_residual = 0.0;
    double min_entropy_production = 0.0;

    bool first_law() const { return max_first_law_residual <= first_law_tolerance; }
    bool second_law() const { return min_entropy_production >= -second_law_tolerance; }
    bool ok() const { return first_law() && second_law(); }
};

LawVerdict judge(const LawSummary& laws);

struct AnalyticDelta {
    std::string quantity;
    double analytic = 0.0;
    double numeric = 0.0;

    double delta() const { return numeric - analytic; }
};

/// Continuous-limit fixed point of a rescaled scenario, with the closed forms
/// that apply to it.
struct SteadyState {
    Matrix2 sigma;
    double energy = 0.0;
    EnergyRates rates;
    std::vector<AnalyticDelta> deltas;
};

/// Empty unless the scenario uses rescaled strengths and its Lyapunov drift is
/// Hurwitz.
std::optional<SteadyState> analyse_steady_state(const CollisionScenario& s);

struct RunResult {
    Trajectory trajectory;
    LawVerdict verdict;
    std::optional<SteadyState> steady;
};

RunResult run_scenario(const CollisionScenario& s, long record_every);

/// Dry-run checks: everything scenario_violations reports, the arccoth domain
/// of the effective bath and the Hurwitz condition when a steady state is
/// expected. Empty when the config can run.
std::vector<std::string> validation_report(const RunConfig& cfg);

/// 17 significant digits, locale independent.
std::string format_number(double x);

void write_trajectory_csv(std::ostream& out, const Trajectory& tr);

/// Collision runs: per-collision changes. Continuous runs: rates, with Sigma the
/// entropy production rate. dQ sums primary and drain heat.
void write_ledger_csv(std::ostream& out, const Trajectory& tr);

void write_summary(std::ostream& out, const CollisionScenario& s, const RunResult& r);

struct SweepRow {
    double value = 0.0;
    RunResult result;
};

/// Runs every sweep point on its own copy of the scenario, in parallel.
/// Rows come back in parameter order.
std::vector<SweepRow> run_sweep(const CollisionScenario& base, const SweepSpec& sweep,
                                long record_every);

void write_sweep_csv(std::ostream& out, const std::string& parameter,
                     const std::vector<SweepRow>& rows);

/// Writes the configured outputs and returns the exit code.
int execute(const RunConfig& cfg);

} // namespace cvcm::cli
