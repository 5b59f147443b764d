// Hamiltonian and drift matrices for a single system oscillator colliding with
// ring-structured environmental units.
//
// Total ordering: R_tot = (x_S, p_S, x_E1, p_E1, ..., x_EN, p_EN), H = 1/2 R^T M R.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

#include "cvcm/gaussian.hpp"

namespace cvcm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Matrix2 = Eigen::Matrix2d;

struct SystemSpec {
    double frequency = 1.0;    // omega_S
    double temperature = 0.0;  // T_S of the initial thermal state
};

struct RingUnitSpec {
    int size = 2;                    // N_E
    double frequency = 1.0;          // omega_E
    double internal_coupling = 0.0;  // lambda_I
    double temperature = 0.0;        // T_E
    bool force_ring = false;         // N_E = 2 with two springs instead of one

    UnitTopology topology() const {
        return (size == 2 && !force_ring) ? UnitTopology::Line : UnitTopology::Ring;
    }
};

enum class CouplingKind { Beamsplitter, Spring };

/// Raw: strength is g (or lambda_E) itself. Rescaled: strength is the
/// continuous-limit rate gamma (or Lambda), converted via g = sqrt(gamma / dt).
enum class StrengthSemantics { Raw, Rescaled };

/// Couple to one normal mode only: site weights g_i = strength * G_{m i}.
struct ModeSelector {
    int mode = 1;  // 1-based, closed-form ordering (1 = center of mass)
    double strength = 0.0;
};

/// Site-basis weights g_{E_i} (or lambda_{E_i}), one per oscillator, in the
/// chosen semantics. Rescaled site weights are scaled by sqrt(1 / dt).
struct SiteWeights {
    std::vector<double> values;
};

struct CouplingSpec {
    CouplingKind kind = CouplingKind::Beamsplitter;
    StrengthSemantics semantics = StrengthSemantics::Raw;
    std::variant<ModeSelector, SiteWeights> weights = ModeSelector{};
};

/// Mode index of the largest-frequency mode for positive internal coupling.
int max_mode_index(int unit_size);

struct DrainSpec {
    double frequency = 1.0;    // omega_B
    double temperature = 0.0;  // T_B
    double rate = 0.0;         // gamma_B
};

void check(const SystemSpec& sys);
void check(const RingUnitSpec& unit);
void check(const DrainSpec& drain);

/// diag(omega_S^2, 1).
Matrix system_hamiltonian(const SystemSpec& sys);

/// Ring unit: position block has omega_E^2 + 4 lambda_I on the diagonal and
/// -2 lambda_I between neighbours (line of two: omega_E^2 + 2 lambda_I and
/// -2 lambda_I); momentum block is the identity.
Matrix build_ring_hamiltonian(const RingUnitSpec& unit);

/// Fourier normal modes of the unit in closed-form order.
NormalModes<double> unit_normal_modes(const RingUnitSpec& unit);

/// Thermal covariance of a fresh unit at T_E.
Matrix unit_thermal_state(const RingUnitSpec& unit);

/// Site weights at a given collision time step. Selectors expand through the
/// unit's mode matrix; rescaled strengths are converted with sqrt(s / dt).
Vector resolve_site_weights(const CouplingSpec& coupling, const RingUnitSpec& unit, double dt);

/// Couplings seen by each normal mode: g~_m = sum_i G_{m i} g_i.
Vector mode_couplings(const Vector& site_weights, const NormalModes<double>& modes);

/// M_SE for H_SE = sum_i g_i (sqrt(wS wE) x_S x_i + p_S p_i / sqrt(wS wE)).
/// The x_S-x_i entries hold g_i sqrt(wS wE) and the p_S-p_i entries hold
/// g_i / sqrt(wS wE) on both sides of the diagonal, so 1/2 R^T M R reproduces
/// each bilinear term once.
Matrix build_beamsplitter_coupling(const SystemSpec& sys, const RingUnitSpec& unit,
                                   const Vector& weights);

/// H_SE = sum_i lambda_i (x_S - x_i)^2 split into its three pieces.
struct SpringCoupling {
    Matrix2 system_shift;        // adds 2 sum lambda_i to the x_S x_S entry
    Matrix environment_shift;    // adds 2 lambda_i to each x_i x_i entry
    Matrix cross;                // -2 lambda_i at (x_S, x_i), full 2(1+N) size
    double renormalized_frequency_sq = 0.0;  // omega_S^2 + 2 sum lambda_i
};

SpringCoupling build_spring_coupling(const SystemSpec& sys, const RingUnitSpec& unit,
                                     const Vector& weights);

/// D_tot = Omega M_tot together with the embeddings D_S' = D_S (+) 0 and
/// D_E' = 0 (+) D_E. D_S and D_E include any frequency renormalization from
/// the coupling, D_SE carries only system-environment cross terms, so
/// D_tot = D_S' + D_E' + D_SE holds exactly.
struct DriftMatrices {
    Matrix2 system;                 // D_S
    Matrix environment;             // D_E
    Matrix interaction;             // D_SE
    Matrix system_embedded;         // D_S'
    Matrix environment_embedded;    // D_E'
    Matrix total;                   // D_tot
    Matrix total_hamiltonian;       // M_tot
    Matrix2 bare_system_hamiltonian;  // M_S without renormalization
    Matrix bare_environment_hamiltonian;  // M_E without renormalization
};

/// Assemble drift matrices from effective system/environment Hamiltonians and
/// the cross block. bare_* are kept for energy bookkeeping.
DriftMatrices build_drift(const Matrix2& system_h, const Matrix& environment_h,
                          const Matrix& cross_h, const Matrix2& bare_system_h,
                          const Matrix& bare_environment_h);

/// Drift for one collision of the given coupling at time step dt.
DriftMatrices build_drift(const SystemSpec& sys, const RingUnitSpec& unit,
                          const CouplingSpec& coupling, double dt);

/// Beamsplitter drain unit (single oscillator) at time step dt.
DriftMatrices build_drain_drift(const SystemSpec& sys, const DrainSpec& drain, double dt);

/// <H> = 1/2 Tr[sigma M].
double quadratic_energy(const Matrix& sigma, const Matrix& hamiltonian);

/// Energy of the bare system oscillator: 1/2 (omega_S^2 sigma_xx + sigma_pp).
double system_energy(const Matrix2& sigma, double frequency);

} // namespace cvcm
