#include "cvcm/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace cvcm {

namespace {

void observe(LawSummary& laws, double residual, double production, double heat) {
    laws.max_first_law_residual = std::max(laws.max_first_law_residual, std::abs(residual));
    laws.min_entropy_production = std::min(laws.min_entropy_production, production);
    laws.max_heat = std::max(laws.max_heat, heat);
    ++laws.steps;
}

TrajectoryPoint initial_point(const Matrix2& sigma, double frequency) {
    TrajectoryPoint p;
    p.sigma = sigma;
    p.thermo.energy = system_energy(sigma, frequency);
    p.thermo.entropy = von_neumann_entropy(sigma);
    return p;
}

Trajectory simulate_collisions(const CollisionScenario& s, const Matrix2& initial,
                               long record_every) {
    const Collider primary = make_primary_collider(s);
    std::optional<Collider> drain;
    if (s.drain) drain.emplace(make_drain_collider(s));
    std::optional<SpringRecursion> recursion;
    if (s.mode == PropagationMode::DiscreteRecursion) recursion = build_spring_recursion(s);

    const double ws = s.system.frequency;
    Trajectory out;
    out.points.push_back(initial_point(initial, ws));
    out.laws.min_uncertainty_margin = uncertainty_margin<double>(initial);

    auto collide = [&](const Collider& c, const Matrix2& sigma, Matrix2& next) {
        CollisionStep step;
        switch (s.mode) {
        case PropagationMode::ExactStep:
            step = c.exact(sigma);
            next = step.system_after();
            break;
        case PropagationMode::SuperoperatorStep:
            step = c.second_order(sigma);
            next = superoperator_step(sigma, c);
            break;
        case PropagationMode::DiscreteRecursion:
            step = c.second_order(sigma);
            next = discrete_recursion_step(sigma, *recursion);
            break;
        case PropagationMode::ContinuousODE:
            throw ModelError("collision propagation requested for a continuous scenario");
        }
        return energy_heat_work(step, c.drift());
    };

    Matrix2 sigma = initial;
    double entropy = out.points.front().thermo.entropy;
    for (long k = 1; k <= s.steps; ++k) {
        Matrix2 next;
        const EnergyExchange ex = collide(primary, sigma, next);
        double residual = ex.first_law_residual();
        ThermoRecord rec;
        rec.internal_energy = ex.internal_energy;
        rec.heat = ex.heat;
        rec.work = ex.work;
        if (drain) {
            Matrix2 drained;
            const EnergyExchange exb = collide(*drain, next, drained);
            residual = std::max(std::abs(residual), std::abs(exb.first_law_residual()));
            rec.internal_energy += exb.internal_energy;
            rec.drain_heat = exb.heat;
            rec.work += exb.work;
            next = drained;
        }
        sigma = next;
        rec.t = s.dt * static_cast<double>(k);
        rec.energy = system_energy(sigma, ws);
        rec.entropy = von_neumann_entropy(sigma);
        rec.entropy_change = rec.entropy - entropy;
        rec.entropy_production =
            drain ? entropy_production(rec.entropy_change, rec.heat, s.unit.temperature,
                                       rec.drain_heat, s.drain->temperature)
                  : entropy_production(rec.entropy_change, rec.heat, s.unit.temperature);
        observe(out.laws, residual, rec.entropy_production, rec.heat);
        entropy = rec.entropy;
        if (k % record_every == 0 || k == s.steps) {
            out.laws.min_uncertainty_margin =
                std::min(out.laws.min_uncertainty_margin, uncertainty_margin<double>(sigma));
            out.points.push_back({rec.t, sigma, rec});
        }
    }
    return out;
}

Trajectory simulate_continuous(const CollisionScenario& s, const Matrix2& initial,
                               long record_every) {
    const LyapunovSystem sys = build_lyapunov(s);
    const ContinuousRateModel rates = make_rate_model(s);
    const double ws = s.system.frequency;
    const auto samples = integrate_lyapunov(sys, initial, s.horizon(), s.integration_step(), 1);

    Trajectory out;
    out.continuous = true;
    const long last = static_cast<long>(samples.size()) - 1;
    for (long k = 0; k <= last; ++k) {
        const auto& sample = samples[static_cast<std::size_t>(k)];
        const Matrix2 sigma_dot = sys.derivative(sample.sigma);
        const EnergyRates r = continuous_rates(sample.sigma, rates);
        ThermoRecord rec;
        rec.t = sample.t;
        rec.energy = system_energy(sample.sigma, ws);
        rec.internal_energy = r.internal_energy;
        rec.heat = r.heat;
        rec.drain_heat = r.drain_heat;
        rec.work = r.work;
        rec.entropy = von_neumann_entropy(sample.sigma);
        rec.entropy_change = entropy_rate(sample.sigma, sigma_dot);
        rec.entropy_production =
            s.drain ? entropy_production(rec.entropy_change, r.heat, s.unit.temperature,
                                         r.drain_heat, s.drain->temperature)
                    : entropy_production(rec.entropy_change, r.heat, s.unit.temperature);
        const double direct = 0.5 * (ws * ws * sigma_dot(0, 0) + sigma_dot(1, 1));
        observe(out.laws, r.internal_energy - direct, rec.entropy_production, rec.heat);
        if (k % record_every == 0 || k == last) {
            out.laws.min_uncertainty_margin =
                std::min(out.laws.min_uncertainty_margin, uncertainty_margin<double>(sample.sigma));
            out.points.push_back({sample.t, sample.sigma, rec});
        }
    }
    return out;
}

} // namespace

Trajectory simulate(const CollisionScenario& s, long record_every) {
    return simulate(s, initial_system_state(s.system), record_every);
}

Trajectory simulate(const CollisionScenario& s, const Matrix2& initial, long record_every) {
    validate(s);
    if (record_every < 1) throw ModelError("record_every must be >= 1");
    if (s.mode == PropagationMode::ContinuousODE) return simulate_continuous(s, initial, record_every);
    return simulate_collisions(s, initial, record_every);
}

} // namespace cvcm
