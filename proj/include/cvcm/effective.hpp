// Closed-form predictions for the continuous-time models. Nothing here calls
// into the engine, so these functions double as independent oracles for it.
#pragma once

#include <utility>

#include "cvcm/model.hpp"

namespace cvcm {

struct Squeezing {
    double r = 0.0;
    double alpha_x = 0.0;
    double alpha_p = 0.0;
};

/// r = 1/4 ln(alpha_p / alpha_x) with
/// alpha_p = sum gamma_m w_m / wE coth(w_m / 2T), alpha_x = sum gamma_m wE / w_m coth(w_m / 2T).
Squeezing effective_squeezing(const Vector& rates, const Vector& mode_frequencies,
                              double unit_frequency, double temperature);

/// T = wE / (2 arccoth(sqrt(alpha_x alpha_p) / gamma)); requires the
/// argument of arccoth to exceed 1.
double effective_temperature(double alpha_x, double alpha_p, double total_rate,
                             double unit_frequency);

/// 1/2 ln((u + 1) / (u - 1)) for u > 1.
double arccoth(double u);

/// Single-mode shortcuts: r = 1/2 ln(w / wE), T = wE / w * T_E.
double single_mode_squeezing(double mode_frequency, double unit_frequency);
double single_mode_effective_temperature(double mode_frequency, double unit_frequency,
                                         double temperature);

/// Single oscillator bath in a squeezed thermal state reproducing the
/// structured unit.
struct EffectiveSqueezedBath {
    double r = 0.0;
    double temperature = 0.0;
    double rate = 0.0;
    double frequency = 0.0;
};

/// When every coupled mode sits at omega_E the temperature is T_E itself.
EffectiveSqueezedBath effective_bath(const Vector& rates, const Vector& mode_frequencies,
                                     double unit_frequency, double temperature);

/// D_eff = D_S - gamma/2 1 and
/// V_eff = gamma/2 coth(wE / 2T) diag(e^{2r} / wS, wS / e^{2r}).
Matrix2 effective_drift(const EffectiveSqueezedBath& bath, double system_frequency);
Matrix2 effective_inhomogeneity(const EffectiveSqueezedBath& bath, double system_frequency);

/// <x^2> = coth(wE/2T) / (2 e^{2r} wE), <p^2> = e^{2r} wE coth(wE/2T) / 2.
std::pair<double, double> squeezed_thermal_second_moments(double r, double temperature,
                                                          double unit_frequency);

/// <H_S> = wS/2 coth(wE / 2T) cosh(2r).
double steady_state_energy_bs(double r, double temperature, double system_frequency,
                              double unit_frequency);

/// E_eq = wS/2 coth(wE / 2T_E).
double equilibrium_energy(double system_frequency, double unit_frequency, double temperature);

/// Largest ring mode for positive coupling: sqrt(wE^2 + 8 lambda) for even N,
/// sqrt(wE^2 + 8 lambda cos^2(pi / 2N)) for odd N. The same mode index is
/// kept for lambda < 0, where it becomes the softest mode.
double max_mode_frequency(int unit_size, double unit_frequency, double coupling);

/// Steady-state energy for beamsplitter coupling to the max mode only.
double max_mode_steady_energy(double system_frequency, double unit_frequency, double temperature,
                              double rate, int unit_size, double coupling);

/// lambda_IC > 0 where the max-mode steady energy returns to E_eq. The
/// bracket grows geometrically from 1e-6; bisection stops at 1e-10 relative
/// width.
double critical_coupling(double system_frequency, double unit_frequency, double temperature,
                         double rate, int unit_size);

/// Steady-state power for max-mode beamsplitter coupling:
/// gamma wS^2 (wE^2 - w^2)^2 / (2 wE^2 w (gamma^2 + 4 wS^2)) coth(w / 2T_E).
double steady_state_work_bs(double rate, double system_frequency, double unit_frequency,
                            double max_frequency, double temperature);

/// sum_m Lambda_m / (gamma_B w_m) coth(w_m / 2T_E) + wS/2 coth(wB / 2T_B).
/// Lambda_1 must vanish (zero-sum spring weights).
double drain_steady_state_energy(const Vector& rates, const Vector& mode_frequencies,
                                 double temperature, double drain_rate, double system_frequency,
                                 double drain_frequency, double drain_temperature);

} // namespace cvcm
