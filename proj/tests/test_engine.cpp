#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "cvcm/engine.hpp"
#include "support.hpp"

using namespace cvcm;
using cvcm::test::Rng;

namespace {

CollisionScenario weighted(CouplingKind kind, double dt) {
    CollisionScenario s;
    s.system = {1.3, 0.7};
    s.unit = {4, 1.1, 0.4, 0.9, false};
    s.coupling = {kind, StrengthSemantics::Raw, SiteWeights{{0.3, -0.2, 0.5, 0.1}}};
    s.dt = dt;
    s.steps = 1;
    return s;
}

CollisionScenario beamsplitter_max_mode() {
    CollisionScenario s;
    s.system = {1.0, 0.3};
    s.unit = {4, 1.0, 0.67, 1.0, false};
    s.coupling = {CouplingKind::Beamsplitter, StrengthSemantics::Rescaled, ModeSelector{3, 0.5}};
    s.dt = 0.01;
    s.steps = 1000;
    s.mode = PropagationMode::ContinuousODE;
    return s;
}

// sigma(t) = e^{Dt} (sigma0 - X) e^{D^T t} + X, X the Lyapunov fixed point.
Matrix2 lyapunov_closed_form(const LyapunovSystem& sys, const Matrix2& sigma0, double t) {
    const Matrix2 x = solve_steady_state(sys);
    const Matrix2 e = (sys.drift * t).exp();
    return e * (sigma0 - x) * e.transpose() + x;
}

} // namespace

TEST_CASE("collision propagator is the symplectic exponential of the drift") {
    for (auto kind : {CouplingKind::Beamsplitter, CouplingKind::Spring}) {
        const auto s = weighted(kind, 0.05);
        const Collider c = make_primary_collider(s);
        const Matrix ref = (c.drift().total * s.dt).exp();
        CHECK((c.propagator() - ref).norm() < 1e-13);
        const Matrix om = symplectic_form<double>(5);
        CHECK((c.propagator() * om * c.propagator().transpose() - om).norm() < 1e-12);
    }
}

TEST_CASE("exact collisions keep states physical") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = test::random_scenario(rng, PropagationMode::ExactStep);
        const Collider c = make_primary_collider(s);
        const Matrix2 sigma = test::random_covariance(rng);
        const CollisionStep step = c.exact(sigma);
        CHECK(is_physical<double>(step.after));
        CHECK((step.after - step.after.transpose()).norm() < 1e-10 * step.after.norm());
        CHECK((step.system_after() - exact_collision_step(sigma, c)).norm() == 0.0);
    }
}

TEST_CASE("second-order expansion is the Taylor polynomial of U sigma U^T") {
    Rng rng(3);
    const Matrix d = rng.matrix(4, 4, 1.0);
    Matrix s = rng.matrix(4, 4, 1.0);
    s = s * s.transpose();
    const double dt = 0.01;
    const Matrix expect = s + dt * (d * s + s * d.transpose()) +
                          dt * dt * (0.5 * d * d * s + 0.5 * s * d.transpose() * d.transpose() +
                                     d * s * d.transpose());
    CHECK((second_order_expansion(s, d, dt) - expect).norm() < 1e-15);
}

TEST_CASE("superoperator equals the system block of the second-order expansion") {
    Rng rng(8);
    for (auto kind : {CouplingKind::Beamsplitter, CouplingKind::Spring}) {
        const auto s = weighted(kind, 0.03);
        const Collider c = make_primary_collider(s);
        const Matrix2 sigma = test::random_covariance(rng);
        const Matrix full = second_order_expansion(c.assemble(sigma), c.drift().total, s.dt);
        CHECK((superoperator_step(sigma, c) - full.topLeftCorner(2, 2)).norm() < 1e-13);
        CHECK((c.second_order(sigma).after - full).norm() < 1e-13);
    }
}

TEST_CASE("superoperator local error shrinks as dt^3") {
    Rng rng(42);
    for (auto kind : {CouplingKind::Beamsplitter, CouplingKind::Spring}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Matrix2 sigma = test::random_covariance(rng);
            double previous = 0.0;
            for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
                const auto s = weighted(kind, dt);
                const Collider c = make_primary_collider(s);
                const double err = (superoperator_step(sigma, c) - exact_collision_step(sigma, c)).norm();
                if (previous > 0) {
                    CHECK(previous / err >= 6.0);
                    CHECK(previous / err <= 10.0);
                }
                previous = err;
            }
        }
    }
}

TEST_CASE("finite-dt spring recursion is the second-order superoperator") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = test::random_scenario(rng, PropagationMode::DiscreteRecursion);
        s.coupling.kind = CouplingKind::Spring;
        s.drain.reset();
        const Matrix2 sigma = test::random_covariance(rng);
        const Matrix2 a = discrete_recursion_step(sigma, s);
        const Matrix2 b = superoperator_step(sigma, s);
        CHECK((a - b).norm() <= 1e-12 * std::max(1.0, b.norm()));
    }
}

TEST_CASE("spring recursion coefficients") {
    CollisionScenario s;
    s.system = {1.0, 1.0};
    s.unit = {4, 1.0, 0.67, 1.0, false};
    s.coupling = {CouplingKind::Spring, StrengthSemantics::Raw, ModeSelector{1, 15.0}};
    s.dt = 0.01;
    s.mode = PropagationMode::DiscreteRecursion;
    const SpringRecursion r = build_spring_recursion(s);
    // Site weights 15 / 2 each: wbar^2 = 1 + 2 * 30.
    CHECK(r.renormalized_frequency_sq == doctest::Approx(61.0));
    CHECK(r.renormalized_drift(1, 0) == doctest::Approx(-61.0));
    CHECK(r.damped_drift(0, 0) == doctest::Approx(-61.0 * 0.01 / 2));
    // V_pp = 2 dt lambda~^2 coth(1/2) / 1 for the center of mass at w = 1.
    CHECK(r.inhomogeneity(1, 1) == doctest::Approx(2 * 0.01 * 225 * thermal_factor(1.0, 1.0)));
    CHECK(r.inhomogeneity(0, 0) == 0.0);
}

TEST_CASE("beamsplitter collisions converge to the Lyapunov equation") {
    auto s = beamsplitter_max_mode();
    const LyapunovSystem sys = build_lyapunov(s);
    const Matrix2 sigma0 = initial_system_state(s.system);
    const double t_end = 2.0;
    const Matrix2 target = lyapunov_closed_form(sys, sigma0, t_end);
    double previous = 0;
    for (double dt : {0.02, 0.01, 0.005}) {
        s.dt = dt;
        const Collider c = make_primary_collider(s);
        Matrix2 sigma = sigma0;
        for (long k = 0; k < std::lround(t_end / dt); ++k) sigma = exact_collision_step(sigma, c);
        const double err = (sigma - target).norm();
        if (previous > 0) CHECK(previous / err == doctest::Approx(2.0).epsilon(0.1));
        previous = err;
    }
}

TEST_CASE("second-order collision increment approaches the Lyapunov derivative") {
    for (auto kind : {CouplingKind::Beamsplitter, CouplingKind::Spring}) {
        CollisionScenario s;
        s.system = {1.2, 0.4};
        s.unit = {4, 0.8, 0.3, 1.1, false};
        s.coupling = {kind, StrengthSemantics::Rescaled, ModeSelector{3, 0.7}};
        s.mode = PropagationMode::ContinuousODE;
        Matrix2 sigma;
        sigma << 0.9, 0.1, 0.1, 0.6;
        const Matrix2 deriv = build_lyapunov(s).derivative(sigma);
        double previous = 0;
        for (double dt : {1e-2, 5e-3, 2.5e-3}) {
            s.dt = dt;
            const Matrix2 inc = (superoperator_step(sigma, s) - sigma) / dt;
            const double err = (inc - deriv).norm();
            if (previous > 0) CHECK(previous / err == doctest::Approx(2.0).epsilon(0.15));
            previous = err;
        }
    }
}

TEST_CASE("RK4 integrator is fourth order and lands on t_end") {
    const LyapunovSystem sys = build_lyapunov(beamsplitter_max_mode());
    Matrix2 sigma0;
    sigma0 << 2.0, 0.3, 0.3, 0.4;
    const double t_end = 3.0;
    const Matrix2 exact = lyapunov_closed_form(sys, sigma0, t_end);
    double previous = 0;
    for (double h : {0.2, 0.1, 0.05}) {
        const auto samples = integrate_lyapunov(sys, sigma0, t_end, h);
        CHECK(samples.back().t == doctest::Approx(t_end).epsilon(1e-14));
        const double err = (samples.back().sigma - exact).norm();
        if (previous > 0) CHECK(previous / err == doctest::Approx(16.0).epsilon(0.15));
        previous = err;
    }
    // A step that does not divide t_end is shortened.
    const auto odd = integrate_lyapunov(sys, sigma0, 1.0, 0.3);
    CHECK(odd.back().t == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(odd.front().t == 0.0);
}

TEST_CASE("integrator samples every record_every steps") {
    const LyapunovSystem sys = build_lyapunov(beamsplitter_max_mode());
    const auto s = integrate_lyapunov(sys, Matrix2::Identity(), 1.0, 0.01, 10);
    CHECK(s.size() == 11);
    CHECK(s[3].t == doctest::Approx(0.3));
}

TEST_CASE("integrator aborts on divergence") {
    LyapunovSystem sys;
    sys.drift << 5.0, 0.0, 0.0, 5.0;
    sys.inhomogeneity.setZero();
    CHECK_THROWS_AS(integrate_lyapunov(sys, Matrix2::Identity(), 10.0, 0.01), NumericalError);
}

TEST_CASE("Lyapunov steady state") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = rng.integer(2, 6);
        const Matrix d = rng.matrix(n, n, 1.0) - 3.0 * Matrix::Identity(n, n);
        Matrix v = rng.matrix(n, n, 1.0);
        v = v * v.transpose();
        REQUIRE(is_hurwitz(d));
        const Matrix x = solve_continuous_lyapunov(d, v);
        CHECK((d * x + x * d.transpose() + v).norm() < 1e-12 * std::max(1.0, x.norm()));
    }
    LyapunovSystem free;
    free.drift << 0, 1, -1, 0;
    free.inhomogeneity.setIdentity();
    CHECK_FALSE(is_hurwitz(free.drift));
    CHECK_THROWS_AS(solve_steady_state(free), NumericalError);
}

TEST_CASE("scenario validation") {
    auto s = beamsplitter_max_mode();
    CHECK(scenario_violations(s).empty());

    auto spring = s;
    spring.coupling = {CouplingKind::Spring, StrengthSemantics::Rescaled, ModeSelector{1, 0.5}};
    const auto v = scenario_violations(spring);
    REQUIRE(v.size() == 1);
    CHECK(v.front().find("sum to zero") != std::string::npos);
    CHECK_THROWS_AS(build_lyapunov(spring), ModelError);

    auto raw = s;
    raw.coupling.semantics = StrengthSemantics::Raw;
    CHECK_FALSE(scenario_violations(raw).empty());

    auto rec = s;
    rec.mode = PropagationMode::DiscreteRecursion;
    CHECK_FALSE(scenario_violations(rec).empty());

    auto bad_mode = s;
    bad_mode.coupling.weights = ModeSelector{7, 1.0};
    CHECK_FALSE(scenario_violations(bad_mode).empty());

    auto unstable = s;
    unstable.unit.internal_coupling = -0.3;
    const auto u = scenario_violations(unstable);
    REQUIRE_FALSE(u.empty());
    CHECK(u.front().find("unstable") != std::string::npos);
    CHECK_THROWS_AS(validate(unstable), ModelError);
}

TEST_CASE("drain adds damping and thermal noise") {
    CollisionScenario s;
    s.system = {1.0, 1.0};
    s.unit = {4, 1.0, 0.2, 1.0, false};
    s.coupling = {CouplingKind::Spring, StrengthSemantics::Rescaled, ModeSelector{3, 0.5}};
    s.mode = PropagationMode::ContinuousODE;
    const LyapunovSystem bare = build_lyapunov(s);
    CHECK_FALSE(is_hurwitz(bare.drift));
    s.drain = DrainSpec{2.0, 0.5, 0.4};
    const LyapunovSystem drained = build_lyapunov(s);
    CHECK(is_hurwitz(drained.drift));
    CHECK((drained.drift - bare.drift).isApprox(-0.2 * Matrix2::Identity()));
    const Matrix2 dv = drained.inhomogeneity - bare.inhomogeneity;
    CHECK(dv(0, 0) == doctest::Approx(0.5 * 0.4 * thermal_factor(2.0, 0.5)));
    CHECK(dv(1, 1) == doctest::Approx(0.5 * 0.4 * thermal_factor(2.0, 0.5)));
}
