// Data series behind the figures: each preset writes CSV files into a
// directory.
//
//   fig2  effective temperature vs lambda_I for N_E = 3, 4, 5 (max-mode beamsplitter)
//   fig3  steady-state energy and power vs lambda_I (N_E = 4, max-mode beamsplitter)
//   fig4  energy vs time, discrete spring collisions with the center of mass
//   fig5  heat and work per collision for the fig4 run
//   fig6  drain steady state vs lambda_I, plus continuous max-mode spring dynamics
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cvcm/cli/runner.hpp"

namespace cvcm::cli {

const std::vector<std::string>& preset_names();

struct TemperatureCurve {
    int unit_size = 0;
    std::vector<double> coupling;
    std::vector<double> temperature;
};

/// T_E-hat over lambda_I in [-0.1, 2], 200 points, for N_E = 3, 4, 5.
std::vector<TemperatureCurve> effective_temperature_curves();

struct SteadyRow {
    double coupling = 0.0;
    double energy = 0.0;
    double analytic_energy = 0.0;
    double work = 0.0;
    double analytic_work = 0.0;
    double heat = 0.0;
};

/// Max-mode beamsplitter steady state, N_E = 4, omega = T = 1, gamma~ = 0.5.
CollisionScenario beamsplitter_steady_scenario(double coupling);
std::vector<SteadyRow> beamsplitter_steady_rows(double from, double to, long count);

/// Zero-sum max-mode spring (Lambda~ = 0.5) plus drain (gamma_B = 0.5),
/// omega = T = 1 everywhere.
CollisionScenario drain_steady_scenario(double coupling);
std::vector<SteadyRow> drain_steady_rows(double from, double to, long count);

/// Writes the preset's files into `dir` (created if needed) and returns the
/// exit code (law-check failures give exit_law_violation).
int run_preset(std::string_view name, const std::filesystem::path& dir);

} // namespace cvcm::cli
