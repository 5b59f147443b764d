// Propagation of the system covariance matrix under repeated collisions with
// fresh environmental units, and the continuous-time Lyapunov limits.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvcm/model.hpp"

namespace cvcm {

enum class PropagationMode {
    ExactStep,          // sigma_tot -> U sigma_tot U^T, U = exp(dt D_tot)
    SuperoperatorStep,  // L0 + L1 + L2 on the system block
    DiscreteRecursion,  // finite-dt spring recursion
    ContinuousODE,      // Lyapunov equation in the continuous limit
};

struct CollisionScenario {
    SystemSpec system;
    RingUnitSpec unit;
    CouplingSpec coupling;
    double dt = 0.01;
    long steps = 0;
    std::optional<DrainSpec> drain;
    PropagationMode mode = PropagationMode::ExactStep;
    std::optional<double> ode_step;  // ContinuousODE only; default min(dt/10, 1e-3)

    double horizon() const { return dt * static_cast<double>(steps); }
    double integration_step() const;
};

/// Every constraint the scenario violates, as readable messages. Empty when
/// the scenario can be run.
std::vector<std::string> scenario_violations(const CollisionScenario& s);

/// Throws ModelError with the first violation.
void validate(const CollisionScenario& s);

/// Thermal initial state of the system oscillator.
Matrix2 initial_system_state(const SystemSpec& sys);

/// Full covariance before and after one collision.
struct CollisionStep {
    Matrix before;
    Matrix after;

    Matrix2 system_after() const { return after.topLeftCorner<2, 2>(); }
};

/// One collision kind with everything that does not depend on sigma_S
/// precomputed: drift matrices, the fresh unit state and the propagator.
class Collider {
public:
    Collider(DriftMatrices drift, Matrix unit_state, double dt);

    const DriftMatrices& drift() const { return drift_; }
    const Matrix& unit_state() const { return unit_state_; }
    const Matrix& propagator() const { return propagator_; }
    double dt() const { return dt_; }
    Eigen::Index dimension() const { return drift_.total.rows(); }

    /// sigma_S (+) sigma_E for an uncorrelated fresh unit.
    Matrix assemble(const Matrix2& system) const;

    CollisionStep exact(const Matrix2& system) const;

    /// U0 + U1 + U2 applied to the full state.
    CollisionStep second_order(const Matrix2& system) const;

private:
    DriftMatrices drift_;
    Matrix unit_state_;
    double dt_;
    Matrix propagator_;
};

Collider make_primary_collider(const CollisionScenario& s);
Collider make_drain_collider(const CollisionScenario& s);

/// Exact symplectic collision, returning the reduced system state.
Matrix2 exact_collision_step(const Matrix2& system, const Collider& collider);
Matrix2 exact_collision_step(const Matrix2& system, const CollisionScenario& s);

/// Second-order Taylor expansion of sigma_tot -> U sigma_tot U^T in dt.
Matrix second_order_expansion(const Matrix& total, const Matrix& drift, double dt);

/// System block of the second-order expansion assembled from the separated
/// drift pieces: L0 + L1 + L2 with L2 = L2^S + L2^SE + L2^{S/SE}. Terms that
/// involve D_E' never reach the system block and are not evaluated.
Matrix2 superoperator_step(const Matrix2& system, const Collider& collider);
Matrix2 superoperator_step(const Matrix2& system, const CollisionScenario& s);

/// Coefficients of the finite-dt spring recursion
///   sigma += dt [D_Sp sigma + sigma D_Sp^T + dt D_RN sigma D_RN^T + V_Sp]
/// with D_Sp = D_RN - (wbar^2 dt / 2) 1 and
/// V_Sp = 2 dt sum_m lambda~_m^2 diag(0, coth(w~_m / 2T_E) / w~_m).
struct SpringRecursion {
    Matrix2 renormalized_drift;  // D_RN
    Matrix2 damped_drift;        // D_Sp
    Matrix2 inhomogeneity;       // V_Sp
    double renormalized_frequency_sq = 0.0;
    double dt = 0.0;
};

SpringRecursion build_spring_recursion(const CollisionScenario& s);
Matrix2 discrete_recursion_step(const Matrix2& system, const SpringRecursion& r);
Matrix2 discrete_recursion_step(const Matrix2& system, const CollisionScenario& s);

/// sigma' = D sigma + sigma D^T + V.
struct LyapunovSystem {
    Matrix2 drift;
    Matrix2 inhomogeneity;

    Matrix2 derivative(const Matrix2& sigma) const {
        return drift * sigma + sigma * drift.transpose() + inhomogeneity;
    }
};

/// Rates gamma~_m (beamsplitter) or Lambda~_m (spring) per normal mode, from a
/// coupling given in rescaled semantics.
Vector rescaled_mode_rates(const CouplingSpec& coupling, const RingUnitSpec& unit);

/// Continuous-limit equation of the scenario: beamsplitter
/// (D_S - gamma/2, V_BS), zero-sum spring (D_S, V_Sp), plus the drain's
/// -gamma_B/2 damping and V_B when present.
LyapunovSystem build_lyapunov(const CollisionScenario& s);

struct LyapunovSample {
    double t = 0.0;
    Matrix2 sigma;
};

/// Classical RK4 with fixed step (adjusted so the last step lands on t_end),
/// symmetrizing after every step. Samples t = 0, every record_every-th step
/// and t_end. Entries beyond 1e12 abort with NumericalError.
std::vector<LyapunovSample> integrate_lyapunov(const LyapunovSystem& sys, const Matrix2& initial,
                                               double t_end, double h, long record_every = 1);

bool is_hurwitz(const Matrix& drift);

/// Solves D X + X D^T + V = 0 through the Kronecker form
/// (I (x) D + D (x) I) vec X = -vec V. Requires a Hurwitz D.
Matrix solve_continuous_lyapunov(const Matrix& drift, const Matrix& inhomogeneity);

Matrix2 solve_steady_state(const LyapunovSystem& sys);

inline constexpr double divergence_threshold = 1e12;

} // namespace cvcm
