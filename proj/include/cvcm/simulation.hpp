#pragma once

#include <limits>
#include <vector>

#include "cvcm/thermo.hpp"

namespace cvcm {

struct TrajectoryPoint {
    double t = 0.0;
    Matrix2 sigma;
    ThermoRecord thermo;
};

/// Worst values seen over every step of a run (not only recorded rows).
struct LawSummary {
    double max_first_law_residual = 0.0;
    double min_entropy_production = std::numeric_limits<double>::infinity();
    double max_heat = -std::numeric_limits<double>::infinity();
    double min_uncertainty_margin = std::numeric_limits<double>::infinity();
    long steps = 0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    LawSummary laws;
    bool continuous = false;  // ledger columns hold rates instead of per-collision changes
};

/// Runs the scenario from the thermal initial state of the system.
///
/// Collision modes evaluate the ledger from the full covariance before and
/// after every collision (exact for ExactStep, the second-order expansion for
/// SuperoperatorStep and DiscreteRecursion); a drain unit, when present,
/// collides right after the primary unit. ContinuousODE integrates the
/// Lyapunov equation and reports rates. In continuous runs the first-law
/// residual compares the closed-form dU/dt with 1/2 Tr[M_S dsigma/dt].
Trajectory simulate(const CollisionScenario& s, long record_every = 1);
Trajectory simulate(const CollisionScenario& s, const Matrix2& initial, long record_every = 1);

} // namespace cvcm
