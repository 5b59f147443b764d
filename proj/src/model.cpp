#include "cvcm/model.hpp"

#include <cmath>
#include <string>

namespace cvcm {

int max_mode_index(int unit_size) { return unit_size / 2 + 1; }

void check(const SystemSpec& sys) {
    if (!(sys.frequency > 0)) throw ModelError("system frequency must be positive");
    if (!(sys.temperature >= 0)) throw ModelError("system temperature must be nonnegative");
}

void check(const RingUnitSpec& unit) {
    if (unit.size < 2) throw ModelError("unit size N_E must be at least 2");
    if (!(unit.frequency > 0)) throw ModelError("unit frequency must be positive");
    if (!(unit.temperature >= 0)) throw ModelError("unit temperature must be nonnegative");
    ring_mode_frequencies<double>(unit.size, unit.frequency, unit.internal_coupling,
                                  unit.topology());
}

void check(const DrainSpec& drain) {
    if (!(drain.frequency > 0)) throw ModelError("drain frequency must be positive");
    if (!(drain.temperature >= 0)) throw ModelError("drain temperature must be nonnegative");
    if (!(drain.rate >= 0)) throw ModelError("drain rate must be nonnegative");
}

Matrix system_hamiltonian(const SystemSpec& sys) {
    check(sys);
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = sys.frequency * sys.frequency;
    m(1, 1) = 1.0;
    return m;
}

Matrix build_ring_hamiltonian(const RingUnitSpec& unit) {
    check(unit);
    const int n = unit.size;
    const double w2 = unit.frequency * unit.frequency;
    const double lam = unit.internal_coupling;
    Matrix m = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) m(2 * i + 1, 2 * i + 1) = 1.0;

    // Each spring lam (x_i - x_j)^2 adds 2 lam to both diagonals and -2 lam to
    // the (i, j) pair.
    auto add_spring = [&](int i, int j) {
        m(2 * i, 2 * i) += 2 * lam;
        m(2 * j, 2 * j) += 2 * lam;
        m(2 * i, 2 * j) -= 2 * lam;
        m(2 * j, 2 * i) -= 2 * lam;
    };
    for (int i = 0; i < n; ++i) m(2 * i, 2 * i) = w2;
    if (unit.topology() == UnitTopology::Line) {
        add_spring(0, 1);
    } else {
        for (int i = 0; i < n; ++i) add_spring(i, (i + 1) % n);
    }
    return m;
}

NormalModes<double> unit_normal_modes(const RingUnitSpec& unit) {
    check(unit);
    return ring_normal_modes<double>(unit.size, unit.frequency, unit.internal_coupling,
                                     unit.topology());
}

Matrix unit_thermal_state(const RingUnitSpec& unit) {
    return thermal_covariance(unit_normal_modes(unit), unit.temperature);
}

Vector resolve_site_weights(const CouplingSpec& coupling, const RingUnitSpec& unit, double dt) {
    const double conversion = coupling.semantics == StrengthSemantics::Rescaled
                                  ? 1.0 / std::sqrt(dt)
                                  : 1.0;
    if (coupling.semantics == StrengthSemantics::Rescaled && !(dt > 0))
        throw ModelError("rescaled couplings need a positive time step");

    if (const auto* sel = std::get_if<ModeSelector>(&coupling.weights)) {
        if (sel->mode < 1 || sel->mode > unit.size)
            throw ModelError("mode selector " + std::to_string(sel->mode) + " outside 1.." +
                             std::to_string(unit.size));
        double strength = sel->strength;
        if (coupling.semantics == StrengthSemantics::Rescaled) {
            if (strength < 0) throw ModelError("rescaled strength must be nonnegative");
            strength = std::sqrt(strength);
        }
        const Matrix g = unit_normal_modes(unit).mode_matrix();
        return strength * conversion * g.row(sel->mode - 1).transpose();
    }
    const auto& site = std::get<SiteWeights>(coupling.weights).values;
    if (static_cast<int>(site.size()) != unit.size)
        throw ModelError("coupling has " + std::to_string(site.size()) + " weights for " +
                         std::to_string(unit.size) + " oscillators");
    return conversion * Eigen::Map<const Vector>(site.data(), unit.size);
}

Vector mode_couplings(const Vector& site_weights, const NormalModes<double>& modes) {
    return modes.mode_matrix() * site_weights;
}

Matrix build_beamsplitter_coupling(const SystemSpec& sys, const RingUnitSpec& unit,
                                   const Vector& weights) {
    if (!(sys.frequency * unit.frequency > 0))
        throw ModelError("beamsplitter coupling needs omega_S * omega_E > 0");
    if (weights.size() != unit.size) throw ModelError("beamsplitter: weight count mismatch");
    const double a = std::sqrt(sys.frequency * unit.frequency);
    const int dim = 2 * (1 + unit.size);
    Matrix m = Matrix::Zero(dim, dim);
    for (int i = 0; i < unit.size; ++i) {
        const int xi = 2 * (i + 1);
        m(0, xi) = m(xi, 0) = weights(i) * a;
        m(1, xi + 1) = m(xi + 1, 1) = weights(i) / a;
    }
    return m;
}

SpringCoupling build_spring_coupling(const SystemSpec& sys, const RingUnitSpec& unit,
                                     const Vector& weights) {
    if (weights.size() != unit.size) throw ModelError("spring: weight count mismatch");
    const int n = unit.size;
    SpringCoupling out;
    out.system_shift = Matrix2::Zero();
    out.system_shift(0, 0) = 2 * weights.sum();
    out.environment_shift = Matrix::Zero(2 * n, 2 * n);
    out.cross = Matrix::Zero(2 * (1 + n), 2 * (1 + n));
    for (int i = 0; i < n; ++i) {
        out.environment_shift(2 * i, 2 * i) = 2 * weights(i);
        const int xi = 2 * (i + 1);
        out.cross(0, xi) = out.cross(xi, 0) = -2 * weights(i);
    }
    out.renormalized_frequency_sq = sys.frequency * sys.frequency + 2 * weights.sum();
    return out;
}

DriftMatrices build_drift(const Matrix2& system_h, const Matrix& environment_h,
                          const Matrix& cross_h, const Matrix2& bare_system_h,
                          const Matrix& bare_environment_h) {
    const Eigen::Index ne = environment_h.rows();
    const Eigen::Index dim = 2 + ne;
    if (environment_h.cols() != ne || ne % 2 != 0 || cross_h.rows() != dim ||
        cross_h.cols() != dim || bare_environment_h.rows() != ne || bare_environment_h.cols() != ne)
        throw ModelError("build_drift: dimension mismatch");
    if (!cross_h.topLeftCorner(2, 2).isZero(0.0) || !cross_h.bottomRightCorner(ne, ne).isZero(0.0))
        throw ModelError("build_drift: cross block must only couple system and environment");

    DriftMatrices d;
    d.system = symplectic_form<double>(1) * system_h;
    d.environment = symplectic_form<double>(ne / 2) * environment_h;
    const Matrix omega = symplectic_form<double>(dim / 2);
    d.interaction = omega * cross_h;
    d.system_embedded = Matrix::Zero(dim, dim);
    d.system_embedded.topLeftCorner(2, 2) = d.system;
    d.environment_embedded = Matrix::Zero(dim, dim);
    d.environment_embedded.bottomRightCorner(ne, ne) = d.environment;
    d.total_hamiltonian = direct_sum<double>(system_h, environment_h) + cross_h;
    d.total = omega * d.total_hamiltonian;
    d.bare_system_hamiltonian = bare_system_h;
    d.bare_environment_hamiltonian = bare_environment_h;
    return d;
}

DriftMatrices build_drift(const SystemSpec& sys, const RingUnitSpec& unit,
                          const CouplingSpec& coupling, double dt) {
    check(sys);
    check(unit);
    const Matrix2 ms = system_hamiltonian(sys);
    const Matrix me = build_ring_hamiltonian(unit);
    const Vector w = resolve_site_weights(coupling, unit, dt);
    if (coupling.kind == CouplingKind::Beamsplitter)
        return build_drift(ms, me, build_beamsplitter_coupling(sys, unit, w), ms, me);
    const SpringCoupling sp = build_spring_coupling(sys, unit, w);
    return build_drift(ms + sp.system_shift, me + sp.environment_shift, sp.cross, ms, me);
}

DriftMatrices build_drain_drift(const SystemSpec& sys, const DrainSpec& drain, double dt) {
    check(drain);
    if (!(dt > 0)) throw ModelError("drain collisions need a positive time step");
    const Matrix2 ms = system_hamiltonian(sys);
    Matrix mb = Matrix::Zero(2, 2);
    mb(0, 0) = drain.frequency * drain.frequency;
    mb(1, 1) = 1.0;
    const double g = std::sqrt(drain.rate / dt);
    const double a = std::sqrt(sys.frequency * drain.frequency);
    Matrix cross = Matrix::Zero(4, 4);
    cross(0, 2) = cross(2, 0) = g * a;
    cross(1, 3) = cross(3, 1) = g / a;
    return build_drift(ms, mb, cross, ms, mb);
}

double quadratic_energy(const Matrix& sigma, const Matrix& hamiltonian) {
    return 0.5 * (sigma.cwiseProduct(hamiltonian.transpose())).sum();
}

double system_energy(const Matrix2& sigma, double frequency) {
    return 0.5 * (frequency * frequency * sigma(0, 0) + sigma(1, 1));
}

} // namespace cvcm
