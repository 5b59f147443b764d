#include <doctest.h>

#include "cvcm/effective.hpp"
#include "cvcm/thermo.hpp"
#include "support.hpp"

using namespace cvcm;
using cvcm::test::Rng;

namespace {

CollisionScenario max_mode_bs(int n, double lam, double temperature, double rate) {
    CollisionScenario s;
    s.system = {1.0, 1.0};
    s.unit = {n, 1.0, lam, temperature, false};
    s.coupling = {CouplingKind::Beamsplitter, StrengthSemantics::Rescaled,
                  ModeSelector{max_mode_index(n), rate}};
    s.mode = PropagationMode::ContinuousODE;
    return s;
}

EffectiveSqueezedBath bath_of(const CollisionScenario& s) {
    return effective_bath(rescaled_mode_rates(s.coupling, s.unit),
                          unit_normal_modes(s.unit).frequencies, s.unit.frequency,
                          s.unit.temperature);
}

} // namespace

TEST_CASE("uncoupled ring gives an unsqueezed bath at the unit temperature") {
    for (int n : {2, 3, 4, 7}) {
        for (int m = 1; m <= n; ++m) {
            auto s = max_mode_bs(n, 0.0, 0.8, 0.5);
            s.coupling.weights = ModeSelector{m, 0.5};
            const auto b = bath_of(s);
            CHECK(b.r == 0.0);
            CHECK(b.temperature == doctest::Approx(0.8).epsilon(1e-14));
        }
    }
}

TEST_CASE("single max mode at lambda = 1") {
    const auto b = bath_of(max_mode_bs(4, 1.0, 1.0, 0.5));
    CHECK(b.r == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
    CHECK(b.temperature == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(b.rate == doctest::Approx(0.5));
    CHECK(single_mode_squeezing(3.0, 1.0) == doctest::Approx(0.5 * std::log(3.0)));
    CHECK(single_mode_effective_temperature(3.0, 1.0, 1.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("single-mode shortcuts agree with the general formulas") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.integer(2, 9);
        const double lam = rng.uniform(-0.1, 3.0);
        const double t = rng.uniform(0.1, 3.0);
        const auto s = max_mode_bs(n, lam, t, rng.uniform(0.1, 2.0));
        const auto b = bath_of(s);
        const double w = max_mode_frequency(n, 1.0, lam);
        CHECK(b.r == doctest::Approx(single_mode_squeezing(w, 1.0)).epsilon(1e-12));
        CHECK(b.temperature ==
              doctest::Approx(single_mode_effective_temperature(w, 1.0, t)).epsilon(1e-12));
        // Squeezing carries the sign of the internal coupling.
        if (std::abs(lam) > 1e-9) CHECK(b.r * lam > 0);
    }
}

TEST_CASE("max mode frequency closed form") {
    for (int n = 2; n <= 11; ++n) {
        for (double lam : {0.1, 0.67, 4.0}) {
            const auto w = unit_normal_modes({n, 1.0, lam, 1.0, false}).frequencies;
            CHECK(max_mode_frequency(n, 1.0, lam) == doctest::Approx(w.maxCoeff()).epsilon(1e-13));
            CHECK(max_mode_frequency(n, 1.0, lam) ==
                  doctest::Approx(w(max_mode_index(n) - 1)).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(max_mode_frequency(4, 1.0, -0.2), ModelError);
}

TEST_CASE("effective temperature domain") {
    CHECK(arccoth(2.0) == doctest::Approx(0.5 * std::log(3.0)));
    CHECK_THROWS_AS(arccoth(1.0), ModelError);
    CHECK_THROWS_AS(effective_temperature(1.0, 1.0, 2.0, 1.0), ModelError);
    CHECK_THROWS_AS(effective_squeezing(Vector::Zero(3), Vector::Ones(3), 1.0, 1.0), ModelError);
}

TEST_CASE("effective bath reproduces the beamsplitter Lyapunov equation") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        CollisionScenario s;
        s.system = {rng.uniform(0.5, 2.0), 0.0};
        s.unit.size = rng.integer(2, 6);
        s.unit.frequency = rng.uniform(0.5, 2.0);
        s.unit.internal_coupling = rng.uniform(-0.05, 1.5);
        s.unit.temperature = rng.uniform(0.1, 3.0);
        SiteWeights w;
        for (int i = 0; i < s.unit.size; ++i) w.values.push_back(rng.uniform(-1.0, 1.0));
        s.coupling = {CouplingKind::Beamsplitter, StrengthSemantics::Rescaled, w};
        s.mode = PropagationMode::ContinuousODE;
        const LyapunovSystem direct = build_lyapunov(s);
        const auto b = bath_of(s);
        CHECK((effective_drift(b, s.system.frequency) - direct.drift).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((effective_inhomogeneity(b, s.system.frequency) - direct.inhomogeneity)
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
}

TEST_CASE("squeezed thermal moments") {
    const auto plain = squeezed_thermal_second_moments(0.0, 1.0, 1.0);
    CHECK(plain.first == doctest::Approx(0.5 * thermal_factor(1.0, 1.0)));
    CHECK(plain.second == doctest::Approx(0.5 * thermal_factor(1.0, 1.0)));
    Rng rng(2);
    for (int k = 0; k < 20; ++k) {
        const double r = rng.uniform(-2, 2);
        const double t = rng.uniform(0.05, 5);
        const double w = rng.uniform(0.2, 3);
        const auto [x2, p2] = squeezed_thermal_second_moments(r, t, w);
        const double c = thermal_factor(w, t);
        CHECK(x2 * p2 == doctest::Approx(c * c / 4).epsilon(1e-12));
        CHECK(x2 * p2 >= 0.25);
    }
}

TEST_CASE("V_eff from squeezed moments equals V_BS") {
    // V = gamma diag(<p^2> / (wS wE), wS wE <x^2>) with the squeezed moments.
    const auto s = max_mode_bs(4, 0.67, 1.0, 0.5);
    const auto b = bath_of(s);
    const auto [x2, p2] = squeezed_thermal_second_moments(b.r, b.temperature, 1.0);
    const double ws = s.system.frequency;
    const double we = s.unit.frequency;
    Matrix2 v = Matrix2::Zero();
    v(0, 0) = b.rate * p2 / (ws * we);
    v(1, 1) = b.rate * ws * we * x2;
    CHECK((v - build_lyapunov(s).inhomogeneity).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("steady-state energy matches the Lyapunov fixed point") {
    for (double lam : {-0.1, 0.0, 0.5, 2.0}) {
        for (double t : {0.3, 1.0, 2.0}) {
            for (double rate : {0.1, 0.5, 1.5}) {
                const auto s = max_mode_bs(4, lam, t, rate);
                const auto b = bath_of(s);
                const Matrix2 x = solve_steady_state(build_lyapunov(s));
                CHECK(steady_state_energy_bs(b.r, b.temperature, 1.0, 1.0) ==
                      doctest::Approx(system_energy(x, 1.0)).epsilon(1e-10));
            }
        }
    }
    CHECK(steady_state_energy_bs(0.0, 1.0, 1.0, 1.0) == doctest::Approx(equilibrium_energy(1, 1, 1)));
}

TEST_CASE("critical coupling separates cooling from heating") {
    const double eq = equilibrium_energy(1, 1, 1);
    const double lic = critical_coupling(1.0, 1.0, 1.0, 0.5, 4);
    CHECK(std::abs(max_mode_steady_energy(1, 1, 1, 0.5, 4, lic) - eq) <= 1e-9);
    for (double lam : {-0.1, -0.01}) CHECK(max_mode_steady_energy(1, 1, 1, 0.5, 4, lam) > eq);
    for (double lam : {0.05, 0.5, 0.9 * lic}) CHECK(max_mode_steady_energy(1, 1, 1, 0.5, 4, lam) < eq);
    for (double lam : {1.1 * lic, 5.0}) CHECK(max_mode_steady_energy(1, 1, 1, 0.5, 4, lam) > eq);
    // At zero temperature the arccoth argument reaches 1.
    CHECK_THROWS(critical_coupling(1.0, 1.0, 0.0, 0.5, 4));
}

TEST_CASE("steady-state power") {
    CHECK(steady_state_work_bs(0.5, 1.0, 1.0, 1.0, 1.0) == 0.0);
    double prev = 0;
    for (double lam = 0.05; lam < 2; lam += 0.05) {
        const double w = steady_state_work_bs(0.5, 1.0, 1.0, max_mode_frequency(4, 1.0, lam), 1.0);
        CHECK(w > prev);
        prev = w;
    }
    prev = 0;
    for (double lam = -0.01; lam > -0.12; lam -= 0.01) {
        const double w = steady_state_work_bs(0.5, 1.0, 1.0, max_mode_frequency(4, 1.0, lam), 1.0);
        CHECK(w > prev);
        prev = w;
    }
    for (double lam : {-0.1, 0.3, 1.0, 2.0}) {
        for (double ws : {0.7, 1.0, 1.6}) {
            auto s = max_mode_bs(4, lam, 1.0, 0.5);
            s.system.frequency = ws;
            const Matrix2 x = solve_steady_state(build_lyapunov(s));
            const EnergyRates r = continuous_rates(x, make_rate_model(s));
            const double expect =
                steady_state_work_bs(0.5, ws, 1.0, max_mode_frequency(4, 1.0, lam), 1.0);
            CHECK(r.work == doctest::Approx(expect).epsilon(1e-9));
            CHECK(-r.heat == doctest::Approx(expect).epsilon(1e-9));
            CHECK(std::abs(r.internal_energy) <= 1e-12);
        }
    }
}

TEST_CASE("drain steady state") {
    const Vector none = Vector::Zero(4);
    const Vector w = unit_normal_modes({4, 1.0, 0.0, 1.0, false}).frequencies;
    CHECK(drain_steady_state_energy(none, w, 1.0, 0.5, 1.0, 2.0, 0.5) ==
          doctest::Approx(equilibrium_energy(1.0, 2.0, 0.5)));

    Vector rates = Vector::Zero(4);
    rates(2) = 0.5;
    CHECK(drain_steady_state_energy(rates, w, 1.0, 0.5, 1.0, 1.0, 1.0) ==
          doctest::Approx(3.24593012060797927).epsilon(1e-15));
    CHECK_THROWS_AS(drain_steady_state_energy(rates, w, 1.0, 0.0, 1.0, 1.0, 1.0), ModelError);
    rates(0) = 0.1;
    CHECK_THROWS_AS(drain_steady_state_energy(rates, w, 1.0, 0.5, 1.0, 1.0, 1.0), ModelError);
}
