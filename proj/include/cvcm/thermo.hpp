// Energy, heat, work and entropy bookkeeping for collisions.
//
// Sign convention: heat is positive when it flows from the environment into
// the system; work is the change of the bare system + unit energy.
#pragma once

#include <optional>
#include <variant>

#include "cvcm/engine.hpp"

namespace cvcm {

struct EnergyExchange {
    double internal_energy = 0.0;  // dU
    double heat = 0.0;             // dQ
    double work = 0.0;             // dW

    double first_law_residual() const { return internal_energy - heat - work; }
};

/// dU = 1/2 Tr[dsigma (M_S (+) 0)], dQ = -1/2 Tr[dsigma (0 (+) M_E)],
/// dW = 1/2 Tr[dsigma (M_S (+) M_E)]; the three traces are evaluated
/// independently.
EnergyExchange energy_heat_work(const Matrix& before, const Matrix& after,
                                const Matrix& system_h, const Matrix& environment_h);

EnergyExchange energy_heat_work(const CollisionStep& step, const DriftMatrices& drift);

/// S_e(nu) = (nu + 1/2) ln(nu + 1/2) - (nu - 1/2) ln(nu - 1/2); exactly 0
/// within 1e-12 of the pure-state value 1/2.
double entropy_function(double nu);

/// Sum of S_e over the symplectic eigenvalues of sigma.
double von_neumann_entropy(const Matrix& sigma);

/// Sigma = dS - dQ / T_E.
double entropy_production(double entropy_change, double heat, double temperature);

/// Two-bath extension: dS - dQ_E / T_E - dQ_B / T_B.
double entropy_production(double entropy_change, double heat, double temperature,
                          double drain_heat, double drain_temperature);

struct ThermoRecord {
    double t = 0.0;
    double energy = 0.0;         // U
    double internal_energy = 0.0;  // dU (per collision, or rate)
    double heat = 0.0;           // dQ from the primary environment
    double drain_heat = 0.0;     // dQ from the drain, zero without one
    double work = 0.0;           // dW
    double entropy = 0.0;        // S
    double entropy_change = 0.0; // dS
    double entropy_production = 0.0;  // Sigma
};

// Continuous-limit rates -----------------------------------------------------

/// Beamsplitter bath: rate gamma~_m on mode w~_m, coupling reference
/// frequency omega_E (the sqrt(wS wE) factor).
struct BeamsplitterRates {
    double system_frequency = 1.0;
    double reference_frequency = 1.0;
    double temperature = 0.0;
    Vector mode_rates;
    Vector mode_frequencies;
};

/// Zero-sum spring bath. mode_rates holds Lambda~_m = lambda~_m^2 dt;
/// pair_rates holds (sum_i lambda_i G_{k i} G_{m i})^2 dt, the couplings the
/// spring induces between unit modes, which only enter the heat.
struct SpringRates {
    double system_frequency = 1.0;
    double temperature = 0.0;
    Vector mode_rates;
    Matrix pair_rates;
    Vector mode_frequencies;
};

struct ContinuousRateModel {
    std::variant<BeamsplitterRates, SpringRates> primary;
    std::optional<BeamsplitterRates> drain;
    double primary_temperature() const;
};

ContinuousRateModel make_rate_model(const CollisionScenario& s);

struct EnergyRates {
    double internal_energy = 0.0;  // dU/dt
    double heat = 0.0;             // dQ/dt from the primary environment
    double drain_heat = 0.0;       // dQ/dt from the drain
    double work = 0.0;             // dW/dt = dU/dt - dQ/dt - dQ_B/dt
};

/// Beamsplitter:
///   dU/dt = sum gamma_m/4 ((wE^2 + w_m^2) wS / (wE w_m) coth_m - 2 wS^2 s_xx - 2 s_pp)
///   dQ/dt = sum gamma_m/2 (w_m coth_m - wS wE s_xx - w_m^2 / (wS wE) s_pp)
/// Spring (zero-sum):
///   dU/dt = sum Lambda_m coth_m / w_m
///   dQ/dt = -2 sum_k [sum_m P_km coth_m / (2 w_m) + Lambda_k s_xx]
EnergyRates continuous_rates(const Matrix2& sigma, const ContinuousRateModel& model);

/// Center-of-mass beamsplitter factor f = gamma/2 [coth(wE/2T_E) - wS s_xx - s_pp / wS],
/// normalized so that (dU, dQ, dW)/dt = (wS f, wE f, (wS - wE) f).
double com_flow_factor(const Matrix2& sigma, double rate, double system_frequency,
                       double unit_frequency, double temperature);

/// Rates through the center-of-mass factor. Throws ModelError unless the
/// model is a beamsplitter bath coupled only to mode 1 with w~_1 = omega_E.
EnergyRates com_rates(const Matrix2& sigma, const ContinuousRateModel& model);

/// dS/dt for a single mode, from d nu / dt = Tr[adj(sigma) dsigma] / (2 nu).
/// At a pure state the rate is +infinity if nu grows and 0 otherwise.
double entropy_rate(const Matrix2& sigma, const Matrix2& sigma_dot);

} // namespace cvcm
