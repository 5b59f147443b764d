// Fixed-seed generators shared by the property tests.
#pragma once

#include <cmath>
#include <random>

#include "cvcm/engine.hpp"

namespace cvcm::test {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool coin() { return integer(0, 1) == 1; }

    Matrix matrix(Eigen::Index rows, Eigen::Index cols, double scale) {
        Matrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(-scale, scale);
        return m;
    }

private:
    std::mt19937_64 engine_;
};

/// Thermal state nu I squeezed by r and rotated by theta: always physical.
inline Matrix2 random_covariance(Rng& rng) {
    const double nu = rng.uniform(0.5, 3.0);
    const double r = rng.uniform(-0.8, 0.8);
    const double th = rng.uniform(0.0, 3.2);
    Matrix2 squeeze;
    squeeze << std::exp(r), 0, 0, std::exp(-r);
    Matrix2 rot;
    rot << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    const Matrix2 s = rot * squeeze;
    return nu * s * s.transpose();
}

inline CollisionScenario draw_scenario(Rng& rng, PropagationMode mode) {
    CollisionScenario s;
    s.system = {rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0)};
    s.unit.size = rng.integer(2, 6);
    s.unit.frequency = rng.uniform(0.5, 2.0);
    s.unit.temperature = rng.uniform(0.1, 3.0);
    const double w2 = s.unit.frequency * s.unit.frequency;
    s.unit.internal_coupling = rng.uniform(-0.1 * w2, 1.5);
    s.unit.force_ring = s.unit.size == 2 && rng.coin();
    s.coupling.kind = rng.coin() ? CouplingKind::Spring : CouplingKind::Beamsplitter;
    s.coupling.semantics = StrengthSemantics::Raw;
    if (rng.coin()) {
        s.coupling.weights = ModeSelector{rng.integer(1, s.unit.size), rng.uniform(-2.0, 2.0)};
    } else {
        SiteWeights w;
        for (int i = 0; i < s.unit.size; ++i) w.values.push_back(rng.uniform(-1.5, 1.5));
        s.coupling.weights = w;
    }
    // The truncated expansions need a short collision.
    s.dt = mode == PropagationMode::ExactStep ? rng.uniform(0.005, 0.1) : rng.uniform(0.005, 0.03);
    s.steps = 40;
    s.mode = mode;
    if (rng.integer(0, 3) == 0)
        s.drain = DrainSpec{rng.uniform(0.5, 2.0), rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0)};
    return s;
}


/// Bounded random scenario; every field lies in a range where the ring is
/// stable and the collision stays well conditioned. Spring draws are redrawn
/// until the joint Hamiltonian is bounded below.
inline CollisionScenario random_scenario(Rng& rng, PropagationMode mode) {
    for (;;) {
        CollisionScenario s = draw_scenario(rng, mode);
        if (s.coupling.kind == CouplingKind::Beamsplitter) return s;
        const Matrix h = build_drift(s.system, s.unit, s.coupling, s.dt).total_hamiltonian;
        if (Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().minCoeff() > 0) return s;
    }
}

} // namespace cvcm::test
