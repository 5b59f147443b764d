// Symplectic linear algebra for zero-mean Gaussian states.
//
// Every phase-space quantity uses the interleaved quadrature ordering
// R = (x_1, p_1, x_2, p_2, ..., x_n, p_n). Quadratic Hamiltonians are stored
// as the symmetric coefficient matrix M of H = 1/2 R^T M R, covariance
// matrices hold the symmetrized second moments 1/2 <R_i R_j + R_j R_i>.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cvcm/errors.hpp"

namespace cvcm {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace tol {
inline constexpr double symmetry = 1e-10;
inline constexpr double physical = 1e-9;
inline constexpr double numeric = 1e-10;
inline constexpr double pairing = 1e-8;
inline constexpr double zero_temperature = 1e-12;
inline constexpr double pure_state = 1e-12;
} // namespace tol

/// Canonical symplectic form: direct sum of n blocks [[0, 1], [-1, 0]].
template <typename Scalar = double>
MatrixX<Scalar> symplectic_form(Eigen::Index n_modes) {
    if (n_modes < 1) throw ModelError("symplectic_form: n_modes must be >= 1");
    MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(2 * n_modes, 2 * n_modes);
    for (Eigen::Index k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = Scalar(1);
        omega(2 * k + 1, 2 * k) = Scalar(-1);
    }
    return omega;
}

/// coth(omega / 2T), with the zero-temperature limit 1 for T below 1e-12.
template <typename Scalar>
Scalar thermal_factor(Scalar frequency, Scalar temperature) {
    using std::tanh;
    if (temperature < Scalar(0)) throw ModelError("negative temperature");
    if (temperature < Scalar(tol::zero_temperature)) return Scalar(1);
    return Scalar(1) / tanh(frequency / (Scalar(2) * temperature));
}

/// Symplectic and orthogonal change of basis Q = G R into decoupled modes,
/// with G M G^T = diag(w_1^2, 1, w_2^2, 1, ...).
template <typename Scalar>
struct NormalModes {
    MatrixX<Scalar> transform;    // G, 2n x 2n
    VectorX<Scalar> frequencies;  // w_m > 0

    Eigen::Index size() const { return frequencies.size(); }

    /// n x n matrix with entry (m, i) = G_{x_m, x_i}; row m is the site-basis
    /// profile of mode m.
    MatrixX<Scalar> mode_matrix() const {
        const Eigen::Index n = size();
        MatrixX<Scalar> out(n, n);
        for (Eigen::Index m = 0; m < n; ++m)
            for (Eigen::Index i = 0; i < n; ++i) out(m, i) = transform(2 * m, 2 * i);
        return out;
    }
};

namespace detail {

// Largest-magnitude component made positive; ties resolve to the lowest index.
template <typename Derived>
void fix_sign(Eigen::MatrixBase<Derived>&& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(v(best)) * (1 + 1e-12)) best = i;
    if (v(best) < 0) v = -v;
}

template <typename Scalar>
MatrixX<Scalar> interleave_modes(const MatrixX<Scalar>& rows) {
    const Eigen::Index n = rows.rows();
    MatrixX<Scalar> g = MatrixX<Scalar>::Zero(2 * n, 2 * n);
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index i = 0; i < n; ++i) {
            g(2 * m, 2 * i) = rows(m, i);
            g(2 * m + 1, 2 * i + 1) = rows(m, i);
        }
    return g;
}

} // namespace detail

/// Normal modes of a Hamiltonian whose momentum block is the identity and
/// which has no x-p cross terms. Modes are ordered by ascending frequency.
template <typename Scalar>
NormalModes<Scalar> normal_mode_decomposition(const MatrixX<Scalar>& hamiltonian) {
    using std::abs;
    using std::sqrt;
    const Eigen::Index dim = hamiltonian.rows();
    if (dim != hamiltonian.cols() || dim % 2 != 0 || dim == 0)
        throw ModelError("normal_mode_decomposition: Hamiltonian must be 2n x 2n");
    const Eigen::Index n = dim / 2;
    const Scalar scale = std::max(Scalar(1), hamiltonian.cwiseAbs().maxCoeff());

    MatrixX<Scalar> position(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            position(i, j) = hamiltonian(2 * i, 2 * j);
            const Scalar expected_p = (i == j) ? Scalar(1) : Scalar(0);
            if (abs(hamiltonian(2 * i + 1, 2 * j + 1) - expected_p) > Scalar(tol::symmetry) * scale ||
                abs(hamiltonian(2 * i, 2 * j + 1)) > Scalar(tol::symmetry) * scale ||
                abs(hamiltonian(2 * i + 1, 2 * j)) > Scalar(tol::symmetry) * scale)
                throw ModelError(
                    "normal_mode_decomposition: Hamiltonian needs identity momentum block "
                    "and no x-p coupling");
        }
    if ((position - position.transpose()).cwiseAbs().maxCoeff() > Scalar(tol::symmetry) * scale)
        throw ModelError("normal_mode_decomposition: Hamiltonian is not symmetric");

    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(position);
    if (solver.info() != Eigen::Success)
        throw NumericalError("normal_mode_decomposition: eigensolver failed");

    VectorX<Scalar> freqs(n);
    MatrixX<Scalar> rows(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        const Scalar w2 = solver.eigenvalues()(m);
        if (w2 <= Scalar(0))
            throw ModelError("unstable mode " + std::to_string(m + 1) + ": squared frequency " +
                             std::to_string(static_cast<double>(w2)) + " <= 0");
        freqs(m) = sqrt(w2);
        rows.row(m) = solver.eigenvectors().col(m).transpose();
        detail::fix_sign(rows.row(m));
    }
    return {detail::interleave_modes(rows), freqs};
}

/// Thermal covariance for given normal modes: each mode gets
/// diag(coth(w/2T)/(2w), w coth(w/2T)/2), mapped back by G^T (.) G.
template <typename Scalar>
MatrixX<Scalar> thermal_covariance(const NormalModes<Scalar>& modes, Scalar temperature) {
    if (temperature < Scalar(0)) throw ModelError("thermal_covariance: negative temperature");
    const Eigen::Index n = modes.size();
    VectorX<Scalar> diag(2 * n);
    for (Eigen::Index m = 0; m < n; ++m) {
        const Scalar w = modes.frequencies(m);
        if (!(w > Scalar(0)))
            throw ModelError("thermal_covariance: mode " + std::to_string(m + 1) +
                             " has non-positive frequency");
        const Scalar c = thermal_factor(w, temperature);
        diag(2 * m) = c / (Scalar(2) * w);
        diag(2 * m + 1) = w * c / Scalar(2);
    }
    MatrixX<Scalar> sigma = modes.transform.transpose() * diag.asDiagonal() * modes.transform;
    return (sigma + sigma.transpose()) / Scalar(2);
}

template <typename Scalar>
MatrixX<Scalar> thermal_covariance(const MatrixX<Scalar>& hamiltonian, Scalar temperature) {
    if (temperature < Scalar(0)) throw ModelError("thermal_covariance: negative temperature");
    return thermal_covariance(normal_mode_decomposition(hamiltonian), temperature);
}

/// Topology of the internal springs of an environmental unit.
enum class UnitTopology {
    Ring,  // periodic chain
    Line,  // open chain; the default for two oscillators (a single spring)
};

inline UnitTopology default_topology(Eigen::Index size) {
    return size == 2 ? UnitTopology::Line : UnitTopology::Ring;
}

/// Closed-form ring spectrum w_m = sqrt(w_E^2 + 8 lambda sin^2(pi (m-1) / N)),
/// m = 1..N. The two-oscillator line has w = {w_E, sqrt(w_E^2 + 4 lambda)}.
template <typename Scalar = double>
VectorX<Scalar> ring_mode_frequencies(Eigen::Index size, Scalar frequency, Scalar coupling,
                                      UnitTopology topology) {
    using std::sin;
    using std::sqrt;
    if (size < 2) throw ModelError("ring_mode_frequencies: unit needs at least 2 oscillators");
    if (topology == UnitTopology::Line && size != 2)
        throw ModelError("ring_mode_frequencies: line topology only defined for 2 oscillators");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    VectorX<Scalar> out(size);
    for (Eigen::Index m = 0; m < size; ++m) {
        Scalar shift;
        if (topology == UnitTopology::Line)
            shift = m == 0 ? Scalar(0) : Scalar(4) * coupling;
        else {
            const Scalar s = sin(pi * Scalar(m) / Scalar(size));
            shift = Scalar(8) * coupling * s * s;
        }
        const Scalar radicand = frequency * frequency + shift;
        if (!(radicand > Scalar(0))) {
            const Scalar s_max = topology == UnitTopology::Line
                                     ? Scalar(4)
                                     : Scalar(8) * [&] {
                                           Scalar best = 0;
                                           for (Eigen::Index k = 0; k < size; ++k) {
                                               const Scalar v = sin(pi * Scalar(k) / Scalar(size));
                                               best = std::max(best, v * v);
                                           }
                                           return best;
                                       }();
            throw ModelError("unstable ring: mode " + std::to_string(m + 1) +
                             " has negative squared frequency; internal coupling must exceed " +
                             std::to_string(static_cast<double>(-frequency * frequency / s_max)));
        }
        out(m) = sqrt(radicand);
    }
    return out;
}

template <typename Scalar = double>
VectorX<Scalar> ring_mode_frequencies(Eigen::Index size, Scalar frequency, Scalar coupling) {
    return ring_mode_frequencies<Scalar>(size, frequency, coupling, default_topology(size));
}

/// Real Fourier normal modes of a ring (or two-site line), in the closed-form
/// order m = 1..N: m = 1 is the center of mass, mode m and N + 2 - m share
/// wave number k = m - 1 (cosine profile for k <= N/2, sine profile for the
/// partner). The basis diagonalizes every circulant coupling, so it stays
/// well-defined when modes are degenerate (including lambda = 0).
template <typename Scalar = double>
NormalModes<Scalar> ring_normal_modes(Eigen::Index size, Scalar frequency, Scalar coupling,
                                      UnitTopology topology) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    VectorX<Scalar> freqs = ring_mode_frequencies<Scalar>(size, frequency, coupling, topology);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar n = Scalar(size);
    MatrixX<Scalar> rows(size, size);
    for (Eigen::Index m = 0; m < size; ++m) {
        for (Eigen::Index j = 0; j < size; ++j) {
            const Scalar jj = Scalar(j);
            Scalar value;
            if (m == 0) {
                value = Scalar(1) / sqrt(n);
            } else if (2 * m == size) {
                value = (j % 2 == 0 ? Scalar(1) : Scalar(-1)) / sqrt(n);
            } else if (2 * m < size) {
                value = sqrt(Scalar(2) / n) * cos(Scalar(2) * pi * Scalar(m) * jj / n);
            } else {
                value = sqrt(Scalar(2) / n) * sin(Scalar(2) * pi * Scalar(size - m) * jj / n);
            }
            rows(m, j) = value;
        }
        detail::fix_sign(rows.row(m));
    }
    return {detail::interleave_modes(rows), freqs};
}

/// Symplectic eigenvalues nu_k = |eig(i Omega sigma)|, one per mode, sorted
/// descending. Each value appears twice in the spectrum; a pair that does not
/// match within 1e-8 means sigma is not a valid covariance matrix.
template <typename Scalar>
VectorX<Scalar> symplectic_eigenvalues(const MatrixX<Scalar>& sigma) {
    using std::abs;
    const Eigen::Index dim = sigma.rows();
    if (dim != sigma.cols() || dim % 2 != 0 || dim == 0)
        throw ModelError("symplectic_eigenvalues: covariance must be 2n x 2n");
    const Scalar scale = std::max(Scalar(1), sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > Scalar(tol::symmetry) * scale)
        throw ModelError("symplectic_eigenvalues: covariance is not symmetric");
    const Eigen::Index n = dim / 2;

    MatrixX<Scalar> generator = symplectic_form<Scalar>(n) * sigma;
    Eigen::EigenSolver<MatrixX<Scalar>> solver(generator, false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("symplectic_eigenvalues: eigensolver failed");
    std::vector<Scalar> mags;
    mags.reserve(static_cast<std::size_t>(dim));
    for (Eigen::Index k = 0; k < dim; ++k) mags.push_back(std::abs(solver.eigenvalues()(k)));
    std::sort(mags.begin(), mags.end(), std::greater<>());

    VectorX<Scalar> nu(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Scalar a = mags[static_cast<std::size_t>(2 * k)];
        const Scalar b = mags[static_cast<std::size_t>(2 * k + 1)];
        if (abs(a - b) > Scalar(tol::pairing) * std::max(Scalar(1), a))
            throw NumericalError("symplectic_eigenvalues: unpaired spectrum (" +
                                 std::to_string(static_cast<double>(a)) + " vs " +
                                 std::to_string(static_cast<double>(b)) + ")");
        nu(k) = (a + b) / Scalar(2);
    }
    return nu;
}

/// Smallest eigenvalue of sigma + i Omega / 2; the uncertainty relation
/// requires it to be nonnegative.
template <typename Scalar>
Scalar uncertainty_margin(const MatrixX<Scalar>& sigma) {
    using Complex = std::complex<Scalar>;
    const Eigen::Index n = sigma.rows() / 2;
    MatrixX<Complex> h = sigma.template cast<Complex>() +
                         Complex(0, Scalar(0.5)) * symplectic_form<Scalar>(n).template cast<Complex>();
    Eigen::SelfAdjointEigenSolver<MatrixX<Complex>> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

template <typename Scalar>
bool is_physical(const MatrixX<Scalar>& sigma, Scalar tolerance = Scalar(tol::physical)) {
    const Scalar scale = std::max(Scalar(1), sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > Scalar(tol::symmetry) * scale)
        return false;
    return uncertainty_margin(sigma) >= -tolerance;
}

/// exp(scale * A) by scaling and squaring around a degree-13 Pade approximant.
template <typename Scalar>
MatrixX<Scalar> matrix_exponential(const MatrixX<Scalar>& a, Scalar scale = Scalar(1)) {
    using std::ceil;
    using std::log2;
    if (a.rows() != a.cols()) throw ModelError("matrix_exponential: matrix must be square");
    if (!a.allFinite()) throw NumericalError("matrix_exponential: non-finite input");
    const Eigen::Index n = a.rows();
    const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
    MatrixX<Scalar> x = scale * a;

    // 1-norm threshold for the degree-13 approximant (Higham 2005).
    constexpr double theta13 = 5.371920351148152;
    const Scalar norm = x.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > Scalar(theta13)) {
        squarings = static_cast<int>(ceil(log2(norm / Scalar(theta13))));
        x /= Scalar(std::ldexp(1.0, squarings));
    }

    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    const MatrixX<Scalar> x2 = x * x;
    const MatrixX<Scalar> x4 = x2 * x2;
    const MatrixX<Scalar> x6 = x4 * x2;
    const MatrixX<Scalar> inner_u =
        x6 * (Scalar(b[13]) * x6 + Scalar(b[11]) * x4 + Scalar(b[9]) * x2) + Scalar(b[7]) * x6 +
        Scalar(b[5]) * x4 + Scalar(b[3]) * x2 + Scalar(b[1]) * id;
    const MatrixX<Scalar> u = x * inner_u;
    const MatrixX<Scalar> v =
        x6 * (Scalar(b[12]) * x6 + Scalar(b[10]) * x4 + Scalar(b[8]) * x2) + Scalar(b[6]) * x6 +
        Scalar(b[4]) * x4 + Scalar(b[2]) * x2 + Scalar(b[0]) * id;
    MatrixX<Scalar> result = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) result = result * result;
    if (!result.allFinite()) throw NumericalError("matrix_exponential: overflow");
    return result;
}

/// Top-left 2k x 2k block, i.e. the reduced state of the first k modes.
template <typename Derived>
auto leading_block(const Eigen::MatrixBase<Derived>& m, Eigen::Index n_modes) {
    return m.topLeftCorner(2 * n_modes, 2 * n_modes);
}

/// Block-diagonal direct sum a (+) b.
template <typename Scalar>
MatrixX<Scalar> direct_sum(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b) {
    MatrixX<Scalar> out = MatrixX<Scalar>::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

} // namespace cvcm
