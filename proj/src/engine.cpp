#include "cvcm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cvcm {

namespace {

constexpr double zero_sum_tolerance = 1e-12;

// [A]_S
Matrix2 sys_block(const Matrix& m) { return m.topLeftCorner<2, 2>(); }

double weight_sum_scale(const Vector& w) { return std::max(1.0, w.cwiseAbs().maxCoeff()); }

} // namespace

double CollisionScenario::integration_step() const {
    if (ode_step) return *ode_step;
    return std::min(dt / 10.0, 1e-3);
}

std::vector<std::string> scenario_violations(const CollisionScenario& s) {
    std::vector<std::string> out;
    auto guard = [&](auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            out.emplace_back(e.what());
        }
    };
    guard([&] { check(s.system); });
    guard([&] { check(s.unit); });
    if (s.drain) guard([&] { check(*s.drain); });
    if (!(s.dt > 0)) out.emplace_back("time step dt must be positive");
    if (s.steps < 0) out.emplace_back("steps must be nonnegative");
    if (s.mode == PropagationMode::ContinuousODE && !(s.integration_step() > 0))
        out.emplace_back("ODE step must be positive");

    if (const auto* sel = std::get_if<ModeSelector>(&s.coupling.weights)) {
        if (sel->mode < 1 || sel->mode > s.unit.size)
            out.emplace_back("mode selector " + std::to_string(sel->mode) + " outside 1.." +
                             std::to_string(s.unit.size));
    } else {
        const auto n = std::get<SiteWeights>(s.coupling.weights).values.size();
        if (static_cast<long>(n) != s.unit.size)
            out.emplace_back("coupling has " + std::to_string(n) + " weights for " +
                             std::to_string(s.unit.size) + " oscillators");
    }
    if (!out.empty()) return out;

    if (s.mode == PropagationMode::DiscreteRecursion) {
        if (s.coupling.kind != CouplingKind::Spring)
            out.emplace_back("discrete recursion requires spring coupling");
        if (s.drain) out.emplace_back("discrete recursion does not support a drain environment");
    }
    if (s.mode == PropagationMode::ContinuousODE) {
        if (s.coupling.semantics != StrengthSemantics::Rescaled)
            out.emplace_back("continuous propagation requires rescaled coupling strengths");
        else if (s.coupling.kind == CouplingKind::Spring) {
            const Vector w = resolve_site_weights(s.coupling, s.unit, 1.0);
            if (std::abs(w.sum()) > zero_sum_tolerance * weight_sum_scale(w))
                out.emplace_back(
                    "continuum limit diverges: spring weights must sum to zero (sum = " +
                    std::to_string(w.sum()) +
                    "), otherwise the renormalized system frequency blows up as dt -> 0");
        }
    }
    return out;
}

void validate(const CollisionScenario& s) {
    const auto v = scenario_violations(s);
    if (!v.empty()) throw ModelError(v.front());
}

Matrix2 initial_system_state(const SystemSpec& sys) {
    check(sys);
    const double c = thermal_factor(sys.frequency, sys.temperature);
    Matrix2 sigma = Matrix2::Zero();
    sigma(0, 0) = c / (2 * sys.frequency);
    sigma(1, 1) = sys.frequency * c / 2;
    return sigma;
}

Collider::Collider(DriftMatrices drift, Matrix unit_state, double dt)
    : drift_(std::move(drift)), unit_state_(std::move(unit_state)), dt_(dt) {
    if (unit_state_.rows() + 2 != drift_.total.rows())
        throw ModelError("Collider: unit state does not match drift dimension");
    propagator_ = matrix_exponential<double>(drift_.total, dt_);
}

Matrix Collider::assemble(const Matrix2& system) const {
    return direct_sum<double>(system, unit_state_);
}

CollisionStep Collider::exact(const Matrix2& system) const {
    Matrix before = assemble(system);
    Matrix after = propagator_ * before * propagator_.transpose();
    after = (after + after.transpose()) / 2;
    return {std::move(before), std::move(after)};
}

CollisionStep Collider::second_order(const Matrix2& system) const {
    Matrix before = assemble(system);
    Matrix after = second_order_expansion(before, drift_.total, dt_);
    return {std::move(before), std::move(after)};
}

Collider make_primary_collider(const CollisionScenario& s) {
    validate(s);
    return Collider(build_drift(s.system, s.unit, s.coupling, s.dt), unit_thermal_state(s.unit),
                    s.dt);
}

Collider make_drain_collider(const CollisionScenario& s) {
    if (!s.drain) throw ModelError("scenario has no drain environment");
    const DrainSpec& b = *s.drain;
    Matrix unit = Matrix::Zero(2, 2);
    const double c = thermal_factor(b.frequency, b.temperature);
    unit(0, 0) = c / (2 * b.frequency);
    unit(1, 1) = b.frequency * c / 2;
    return Collider(build_drain_drift(s.system, b, s.dt), unit, s.dt);
}

Matrix2 exact_collision_step(const Matrix2& system, const Collider& collider) {
    return collider.exact(system).system_after();
}

Matrix2 exact_collision_step(const Matrix2& system, const CollisionScenario& s) {
    return exact_collision_step(system, make_primary_collider(s));
}

Matrix second_order_expansion(const Matrix& total, const Matrix& drift, double dt) {
    const Matrix ds = drift * total;
    const Matrix first = ds + ds.transpose();
    const Matrix d2s = drift * ds;
    const Matrix second = 2 * ds * drift.transpose() + d2s + d2s.transpose();
    Matrix out = total + dt * first + 0.5 * dt * dt * second;
    return (out + out.transpose()) / 2;
}

Matrix2 superoperator_step(const Matrix2& system, const Collider& collider) {
    const DriftMatrices& d = collider.drift();
    const double dt = collider.dt();
    const Matrix tot = collider.assemble(system);
    const Matrix2& ds = d.system;
    const Matrix& dse = d.interaction;
    const Matrix& dsp = d.system_embedded;

    const Matrix2 l1 = ds * system + system * ds.transpose() + sys_block(dse * tot) +
                       sys_block(tot * dse.transpose());

    const Matrix2 l2_s = 2 * ds * system * ds.transpose() + ds * ds * system +
                         system * ds.transpose() * ds.transpose();
    const Matrix2 l2_se = 2 * sys_block(dse * tot * dse.transpose()) +
                          sys_block(dse * dse * tot) +
                          sys_block(tot * dse.transpose() * dse.transpose());
    const Matrix2 l2_mixed =
        2 * sys_block(dsp * tot * dse.transpose()) + 2 * sys_block(dse * tot * dsp.transpose()) +
        sys_block(dsp * dse * tot) + sys_block(dse * dsp * tot) +
        sys_block(tot * dsp.transpose() * dse.transpose()) +
        sys_block(tot * dse.transpose() * dsp.transpose());

    Matrix2 out = system + dt * l1 + 0.5 * dt * dt * (l2_s + l2_se + l2_mixed);
    return (out + out.transpose()) / 2;
}

Matrix2 superoperator_step(const Matrix2& system, const CollisionScenario& s) {
    return superoperator_step(system, make_primary_collider(s));
}

SpringRecursion build_spring_recursion(const CollisionScenario& s) {
    validate(s);
    if (s.coupling.kind != CouplingKind::Spring)
        throw ModelError("discrete recursion requires spring coupling");
    const Vector w = resolve_site_weights(s.coupling, s.unit, s.dt);
    const NormalModes<double> modes = unit_normal_modes(s.unit);
    const Vector lam = mode_couplings(w, modes);

    SpringRecursion r;
    r.dt = s.dt;
    r.renormalized_frequency_sq = s.system.frequency * s.system.frequency + 2 * w.sum();
    r.renormalized_drift << 0, 1, -r.renormalized_frequency_sq, 0;
    r.damped_drift =
        r.renormalized_drift - (r.renormalized_frequency_sq * s.dt / 2) * Matrix2::Identity();
    double pp = 0;
    for (Eigen::Index m = 0; m < lam.size(); ++m) {
        const double wm = modes.frequencies(m);
        pp += lam(m) * lam(m) * thermal_factor(wm, s.unit.temperature) / wm;
    }
    r.inhomogeneity = Matrix2::Zero();
    r.inhomogeneity(1, 1) = 2 * s.dt * pp;
    return r;
}

Matrix2 discrete_recursion_step(const Matrix2& system, const SpringRecursion& r) {
    const Matrix2& d = r.damped_drift;
    const Matrix2& rn = r.renormalized_drift;
    Matrix2 out = system + r.dt * (d * system + system * d.transpose() +
                                   r.dt * rn * system * rn.transpose() + r.inhomogeneity);
    return (out + out.transpose()) / 2;
}

Matrix2 discrete_recursion_step(const Matrix2& system, const CollisionScenario& s) {
    return discrete_recursion_step(system, build_spring_recursion(s));
}

Vector rescaled_mode_rates(const CouplingSpec& coupling, const RingUnitSpec& unit) {
    if (coupling.semantics != StrengthSemantics::Rescaled)
        throw ModelError("continuous limit requires rescaled coupling strengths");
    // With dt = 1 the resolved weights are the rescaled amplitudes sqrt(rate).
    const Vector amp = mode_couplings(resolve_site_weights(coupling, unit, 1.0),
                                      unit_normal_modes(unit));
    return amp.cwiseAbs2();
}

LyapunovSystem build_lyapunov(const CollisionScenario& s) {
    check(s.system);
    check(s.unit);
    const double ws = s.system.frequency;
    const double we = s.unit.frequency;
    const double te = s.unit.temperature;
    const NormalModes<double> modes = unit_normal_modes(s.unit);
    const Vector rates = rescaled_mode_rates(s.coupling, s.unit);

    LyapunovSystem out;
    out.drift << 0, 1, -ws * ws, 0;
    out.inhomogeneity = Matrix2::Zero();

    if (s.coupling.kind == CouplingKind::Beamsplitter) {
        for (Eigen::Index m = 0; m < rates.size(); ++m) {
            const double wm = modes.frequencies(m);
            const double c = rates(m) / 2 * thermal_factor(wm, te);
            out.inhomogeneity(0, 0) += c * wm / (ws * we);
            out.inhomogeneity(1, 1) += c * ws * we / wm;
        }
        out.drift -= rates.sum() / 2 * Matrix2::Identity();
    } else {
        const Vector w = resolve_site_weights(s.coupling, s.unit, 1.0);
        if (std::abs(w.sum()) > zero_sum_tolerance * weight_sum_scale(w))
            throw ModelError(
                "continuum limit diverges: spring weights must sum to zero, otherwise the "
                "renormalized system frequency blows up as dt -> 0");
        for (Eigen::Index m = 0; m < rates.size(); ++m) {
            const double wm = modes.frequencies(m);
            out.inhomogeneity(1, 1) += 2 * rates(m) * thermal_factor(wm, te) / wm;
        }
    }

    if (s.drain) {
        check(*s.drain);
        const DrainSpec& b = *s.drain;
        const double c = thermal_factor(b.frequency, b.temperature);
        out.drift -= b.rate / 2 * Matrix2::Identity();
        out.inhomogeneity(0, 0) += b.rate * c / (2 * ws);
        out.inhomogeneity(1, 1) += b.rate * ws * c / 2;
    }
    return out;
}

std::vector<LyapunovSample> integrate_lyapunov(const LyapunovSystem& sys, const Matrix2& initial,
                                               double t_end, double h, long record_every) {
    if (!(h > 0)) throw ModelError("integrate_lyapunov: step must be positive");
    if (!(t_end >= 0)) throw ModelError("integrate_lyapunov: t_end must be nonnegative");
    if (record_every < 1) throw ModelError("integrate_lyapunov: record_every must be >= 1");
    long n = static_cast<long>(std::ceil(t_end / h - 1e-9));
    if (t_end > 0) n = std::max(n, 1L);
    const double step = n > 0 ? t_end / static_cast<double>(n) : 0.0;

    std::vector<LyapunovSample> out;
    out.reserve(static_cast<std::size_t>(n / record_every + 2));
    Matrix2 sigma = initial;
    out.push_back({0.0, sigma});
    for (long k = 1; k <= n; ++k) {
        const Matrix2 k1 = sys.derivative(sigma);
        const Matrix2 k2 = sys.derivative(sigma + step / 2 * k1);
        const Matrix2 k3 = sys.derivative(sigma + step / 2 * k2);
        const Matrix2 k4 = sys.derivative(sigma + step * k3);
        sigma += step / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        sigma = (sigma + sigma.transpose()) / 2;
        if (!sigma.allFinite() || sigma.cwiseAbs().maxCoeff() > divergence_threshold) {
            std::ostringstream msg;
            msg << "integrate_lyapunov: divergence at t = " << step * static_cast<double>(k)
                << " (max |sigma| > 1e12); exponential growth indicates an unstable drift";
            throw NumericalError(msg.str());
        }
        if (k % record_every == 0 || k == n)
            out.push_back({k == n ? t_end : step * static_cast<double>(k), sigma});
    }
    return out;
}

bool is_hurwitz(const Matrix& drift) {
    Eigen::EigenSolver<Matrix> solver(drift, false);
    return (solver.eigenvalues().real().array() < 0).all();
}

Matrix solve_continuous_lyapunov(const Matrix& drift, const Matrix& inhomogeneity) {
    const Eigen::Index n = drift.rows();
    if (drift.cols() != n || inhomogeneity.rows() != n || inhomogeneity.cols() != n)
        throw ModelError("solve_continuous_lyapunov: dimension mismatch");
    if (!is_hurwitz(drift))
        throw NumericalError("no steady state: drift has eigenvalues with nonnegative real part");
    const Matrix id = Matrix::Identity(n, n);
    Matrix op = Matrix::Zero(n * n, n * n);
    // Column-major vec: vec(D X) = (I (x) D) vec X, vec(X D^T) = (D (x) I) vec X.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            op.block(i * n, j * n, n, n) += id(i, j) * drift;
            op.block(i * n, j * n, n, n) += drift(i, j) * id;
        }
    const Vector rhs = -Eigen::Map<const Vector>(inhomogeneity.data(), n * n);
    const Vector x = op.fullPivLu().solve(rhs);
    Matrix out = Eigen::Map<const Matrix>(x.data(), n, n);
    return (out + out.transpose()) / 2;
}

Matrix2 solve_steady_state(const LyapunovSystem& sys) {
    return solve_continuous_lyapunov(sys.drift, sys.inhomogeneity);
}

} // namespace cvcm
