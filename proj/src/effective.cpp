#include "cvcm/effective.hpp"

#include <cmath>

namespace cvcm {

namespace {

double coth_half(double w, double t) { return thermal_factor(w, t); }

} // namespace

Squeezing effective_squeezing(const Vector& rates, const Vector& mode_frequencies,
                              double unit_frequency, double temperature) {
    if (rates.size() != mode_frequencies.size())
        throw ModelError("effective_squeezing: rates and frequencies differ in length");
    if ((rates.array() < 0).any()) throw ModelError("effective_squeezing: negative rate");
    if (!(rates.sum() > 0)) throw ModelError("effective_squeezing: all couplings are zero");
    Squeezing s;
    for (Eigen::Index m = 0; m < rates.size(); ++m) {
        const double wm = mode_frequencies(m);
        const double c = coth_half(wm, temperature);
        s.alpha_p += rates(m) * wm / unit_frequency * c;
        s.alpha_x += rates(m) * unit_frequency / wm * c;
    }
    s.r = 0.25 * std::log(s.alpha_p / s.alpha_x);
    return s;
}

double arccoth(double u) {
    if (!(u > 1)) throw ModelError("arccoth: argument " + std::to_string(u) + " not above 1");
    return 0.5 * std::log((u + 1) / (u - 1));
}

double effective_temperature(double alpha_x, double alpha_p, double total_rate,
                             double unit_frequency) {
    if (!(total_rate > 0)) throw ModelError("effective_temperature: rate must be positive");
    const double u = std::sqrt(alpha_x * alpha_p) / total_rate;
    if (!(u > 1))
        throw ModelError("effective_temperature: sqrt(alpha_x alpha_p) / gamma = " +
                         std::to_string(u) + " must exceed 1");
    return unit_frequency / (2 * arccoth(u));
}

double single_mode_squeezing(double mode_frequency, double unit_frequency) {
    return 0.5 * std::log(mode_frequency / unit_frequency);
}

double single_mode_effective_temperature(double mode_frequency, double unit_frequency,
                                         double temperature) {
    return unit_frequency / mode_frequency * temperature;
}

EffectiveSqueezedBath effective_bath(const Vector& rates, const Vector& mode_frequencies,
                                     double unit_frequency, double temperature) {
    const Squeezing s = effective_squeezing(rates, mode_frequencies, unit_frequency, temperature);
    EffectiveSqueezedBath b;
    b.r = s.r;
    b.rate = rates.sum();
    b.frequency = unit_frequency;
    bool resonant = true;
    for (Eigen::Index m = 0; m < rates.size(); ++m)
        resonant = resonant && (rates(m) == 0 || mode_frequencies(m) == unit_frequency);
    // Every coupled mode at omega_E: the effective bath is the unit itself.
    b.temperature = resonant ? temperature
                             : effective_temperature(s.alpha_x, s.alpha_p, b.rate, unit_frequency);
    return b;
}

Matrix2 effective_drift(const EffectiveSqueezedBath& bath, double system_frequency) {
    Matrix2 d;
    d << -bath.rate / 2, 1, -system_frequency * system_frequency, -bath.rate / 2;
    return d;
}

Matrix2 effective_inhomogeneity(const EffectiveSqueezedBath& bath, double system_frequency) {
    const double c = bath.rate / 2 * coth_half(bath.frequency, bath.temperature);
    const double e2r = std::exp(2 * bath.r);
    Matrix2 v = Matrix2::Zero();
    v(0, 0) = c * e2r / system_frequency;
    v(1, 1) = c * system_frequency / e2r;
    return v;
}

std::pair<double, double> squeezed_thermal_second_moments(double r, double temperature,
                                                          double unit_frequency) {
    if (!(temperature > 0)) throw ModelError("squeezed moments: temperature must be positive");
    const double c = coth_half(unit_frequency, temperature);
    const double e2r = std::exp(2 * r);
    return {c / (2 * e2r * unit_frequency), e2r * unit_frequency * c / 2};
}

double steady_state_energy_bs(double r, double temperature, double system_frequency,
                              double unit_frequency) {
    if (!(temperature > 0)) throw ModelError("steady_state_energy_bs: temperature must be positive");
    return system_frequency / 2 * coth_half(unit_frequency, temperature) * std::cosh(2 * r);
}

double equilibrium_energy(double system_frequency, double unit_frequency, double temperature) {
    return system_frequency / 2 * coth_half(unit_frequency, temperature);
}

double max_mode_frequency(int unit_size, double unit_frequency, double coupling) {
    return ring_mode_frequencies<double>(unit_size, unit_frequency, coupling)(max_mode_index(unit_size) - 1);
}

double max_mode_steady_energy(double system_frequency, double unit_frequency, double temperature,
                              double rate, int unit_size, double coupling) {
    const Vector rates = Vector::Constant(1, rate);
    const Vector freqs =
        Vector::Constant(1, max_mode_frequency(unit_size, unit_frequency, coupling));
    const EffectiveSqueezedBath b = effective_bath(rates, freqs, unit_frequency, temperature);
    return steady_state_energy_bs(b.r, b.temperature, system_frequency, unit_frequency);
}

double critical_coupling(double system_frequency, double unit_frequency, double temperature,
                         double rate, int unit_size) {
    const double eq = equilibrium_energy(system_frequency, unit_frequency, temperature);
    auto excess = [&](double lam) {
        return max_mode_steady_energy(system_frequency, unit_frequency, temperature, rate,
                                      unit_size, lam) -
               eq;
    };
    constexpr double start = 1e-6;
    constexpr double cap = 1e8;
    double lo = start;
    if (excess(lo) >= 0)
        throw NumericalError("critical_coupling: steady energy not below E_eq near lambda = 0+");
    double hi = lo;
    while (excess(hi) < 0) {
        lo = hi;
        hi *= 2;
        if (hi > cap) throw NumericalError("critical_coupling: no bracketing interval found");
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double steady_state_work_bs(double rate, double system_frequency, double unit_frequency,
                            double max_frequency, double temperature) {
    const double ws2 = system_frequency * system_frequency;
    const double we2 = unit_frequency * unit_frequency;
    const double detune = we2 - max_frequency * max_frequency;
    return rate * ws2 * detune * detune /
           (2 * we2 * max_frequency * (rate * rate + 4 * ws2)) *
           coth_half(max_frequency, temperature);
}

double drain_steady_state_energy(const Vector& rates, const Vector& mode_frequencies,
                                 double temperature, double drain_rate, double system_frequency,
                                 double drain_frequency, double drain_temperature) {
    if (!(drain_rate > 0)) throw ModelError("drain steady state needs gamma_B > 0");
    if (rates.size() != mode_frequencies.size() || rates.size() == 0)
        throw ModelError("drain_steady_state_energy: rates and frequencies differ in length");
    if (std::abs(rates(0)) > 1e-12 * std::max(1.0, rates.cwiseAbs().maxCoeff()))
        throw ModelError("drain_steady_state_energy: center-of-mass rate must vanish");
    double e = 0;
    for (Eigen::Index m = 1; m < rates.size(); ++m) {
        const double wm = mode_frequencies(m);
        e += rates(m) / (drain_rate * wm) * coth_half(wm, temperature);
    }
    return e + system_frequency / 2 * coth_half(drain_frequency, drain_temperature);
}

} // namespace cvcm
