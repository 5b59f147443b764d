#include "cvcm/thermo.hpp"

#include <cmath>
#include <limits>

namespace cvcm {

EnergyExchange energy_heat_work(const Matrix& before, const Matrix& after,
                                const Matrix& system_h, const Matrix& environment_h) {
    const Eigen::Index ns = system_h.rows();
    const Eigen::Index ne = environment_h.rows();
    const Eigen::Index dim = ns + ne;
    if (before.rows() != dim || before.cols() != dim || after.rows() != dim ||
        after.cols() != dim || system_h.cols() != ns || environment_h.cols() != ne)
        throw ModelError("energy_heat_work: dimension mismatch");
    const Matrix delta = after - before;
    const Matrix zs = Matrix::Zero(ns, ns);
    const Matrix ze = Matrix::Zero(ne, ne);
    EnergyExchange out;
    out.internal_energy = quadratic_energy(delta, direct_sum<double>(system_h, ze));
    out.heat = -quadratic_energy(delta, direct_sum<double>(zs, environment_h));
    out.work = quadratic_energy(delta, direct_sum<double>(system_h, environment_h));
    return out;
}

EnergyExchange energy_heat_work(const CollisionStep& step, const DriftMatrices& drift) {
    return energy_heat_work(step.before, step.after, drift.bare_system_hamiltonian,
                            drift.bare_environment_hamiltonian);
}

double entropy_function(double nu) {
    const double excess = nu - 0.5;
    if (excess < -tol::physical)
        throw ModelError("entropy: symplectic eigenvalue " + std::to_string(nu) +
                         " below 1/2 (unphysical state)");
    if (excess <= tol::pure_state) return 0.0;
    return (nu + 0.5) * std::log(nu + 0.5) - excess * std::log(excess);
}

double von_neumann_entropy(const Matrix& sigma) {
    const Vector nu = symplectic_eigenvalues<double>(sigma);
    double s = 0;
    for (Eigen::Index k = 0; k < nu.size(); ++k) s += entropy_function(nu(k));
    return s;
}

double entropy_production(double entropy_change, double heat, double temperature) {
    if (!(temperature > 0))
        throw ModelError("entropy production undefined for environment temperature 0");
    return entropy_change - heat / temperature;
}

double entropy_production(double entropy_change, double heat, double temperature,
                          double drain_heat, double drain_temperature) {
    if (!(drain_temperature > 0))
        throw ModelError("entropy production undefined for drain temperature 0");
    return entropy_production(entropy_change, heat, temperature) - drain_heat / drain_temperature;
}

double ContinuousRateModel::primary_temperature() const {
    return std::visit([](const auto& m) { return m.temperature; }, primary);
}

ContinuousRateModel make_rate_model(const CollisionScenario& s) {
    check(s.system);
    check(s.unit);
    const NormalModes<double> modes = unit_normal_modes(s.unit);
    ContinuousRateModel out;
    if (s.coupling.kind == CouplingKind::Beamsplitter) {
        BeamsplitterRates bs;
        bs.system_frequency = s.system.frequency;
        bs.reference_frequency = s.unit.frequency;
        bs.temperature = s.unit.temperature;
        bs.mode_rates = rescaled_mode_rates(s.coupling, s.unit);
        bs.mode_frequencies = modes.frequencies;
        out.primary = bs;
    } else {
        const Vector w = resolve_site_weights(s.coupling, s.unit, 1.0);
        const Matrix g = modes.mode_matrix();
        const Eigen::Index n = w.size();
        SpringRates sp;
        sp.system_frequency = s.system.frequency;
        sp.temperature = s.unit.temperature;
        sp.mode_rates = (g * w).cwiseAbs2();
        sp.pair_rates = Matrix::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index m = 0; m < n; ++m) {
                const double c = (w.array() * g.row(k).transpose().array() *
                                  g.row(m).transpose().array())
                                     .sum();
                sp.pair_rates(k, m) = c * c;
            }
        sp.mode_frequencies = modes.frequencies;
        out.primary = sp;
    }
    if (s.drain) {
        check(*s.drain);
        BeamsplitterRates b;
        b.system_frequency = s.system.frequency;
        b.reference_frequency = s.drain->frequency;
        b.temperature = s.drain->temperature;
        b.mode_rates = Vector::Constant(1, s.drain->rate);
        b.mode_frequencies = Vector::Constant(1, s.drain->frequency);
        out.drain = b;
    }
    return out;
}

namespace {

struct Flow {
    double energy;
    double heat;
};

Flow beamsplitter_flow(const Matrix2& s, const BeamsplitterRates& m) {
    const double ws = m.system_frequency;
    const double we = m.reference_frequency;
    Flow f{0, 0};
    for (Eigen::Index k = 0; k < m.mode_rates.size(); ++k) {
        const double g = m.mode_rates(k);
        const double wm = m.mode_frequencies(k);
        const double c = thermal_factor(wm, m.temperature);
        f.energy += g / 4 *
                    ((we * we + wm * wm) * ws / (we * wm) * c - 2 * ws * ws * s(0, 0) - 2 * s(1, 1));
        f.heat += g / 2 * (wm * c - ws * we * s(0, 0) - wm * wm / (ws * we) * s(1, 1));
    }
    return f;
}

Flow spring_flow(const Matrix2& s, const SpringRates& m) {
    Flow f{0, 0};
    const Eigen::Index n = m.mode_rates.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double wk = m.mode_frequencies(k);
        const double ck = thermal_factor(wk, m.temperature);
        f.energy += m.mode_rates(k) * ck / wk;
        double env = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double wj = m.mode_frequencies(j);
            env += m.pair_rates(k, j) * thermal_factor(wj, m.temperature) / (2 * wj);
        }
        f.heat -= 2 * (env + m.mode_rates(k) * s(0, 0));
    }
    return f;
}

} // namespace

EnergyRates continuous_rates(const Matrix2& sigma, const ContinuousRateModel& model) {
    const Flow primary = std::visit(
        [&](const auto& m) -> Flow {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BeamsplitterRates>)
                return beamsplitter_flow(sigma, m);
            else
                return spring_flow(sigma, m);
        },
        model.primary);
    EnergyRates out;
    out.internal_energy = primary.energy;
    out.heat = primary.heat;
    if (model.drain) {
        const Flow d = beamsplitter_flow(sigma, *model.drain);
        out.internal_energy += d.energy;
        out.drain_heat = d.heat;
    }
    out.work = out.internal_energy - out.heat - out.drain_heat;
    return out;
}

double com_flow_factor(const Matrix2& sigma, double rate, double system_frequency,
                       double unit_frequency, double temperature) {
    return rate / 2 *
           (thermal_factor(unit_frequency, temperature) - system_frequency * sigma(0, 0) -
            sigma(1, 1) / system_frequency);
}

EnergyRates com_rates(const Matrix2& sigma, const ContinuousRateModel& model) {
    const auto* bs = std::get_if<BeamsplitterRates>(&model.primary);
    if (!bs || model.drain) throw ModelError("com_rates: needs a beamsplitter model without drain");
    const Eigen::Index n = bs->mode_rates.size();
    const double scale = std::max(1.0, bs->mode_rates.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 1; k < n; ++k)
        if (std::abs(bs->mode_rates(k)) > 1e-12 * scale)
            throw ModelError("com_rates: coupling reaches modes other than the center of mass");
    if (std::abs(bs->mode_frequencies(0) - bs->reference_frequency) > tol::numeric)
        throw ModelError("com_rates: mode 1 is not at the unit frequency");
    const double f = com_flow_factor(sigma, bs->mode_rates(0), bs->system_frequency,
                                     bs->reference_frequency, bs->temperature);
    EnergyRates out;
    out.internal_energy = bs->system_frequency * f;
    out.heat = bs->reference_frequency * f;
    out.work = (bs->system_frequency - bs->reference_frequency) * f;
    return out;
}

double entropy_rate(const Matrix2& sigma, const Matrix2& sigma_dot) {
    const double det = sigma.determinant();
    const double nu = std::sqrt(std::max(det, 0.0));
    Matrix2 adj;
    adj << sigma(1, 1), -sigma(0, 1), -sigma(1, 0), sigma(0, 0);
    const double dnu = (adj * sigma_dot).trace() / (2 * nu);
    if (nu - 0.5 <= tol::pure_state)
        return dnu > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::log((nu + 0.5) / (nu - 0.5)) * dnu;
}

} // namespace cvcm
