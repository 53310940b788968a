#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lindblad/error.hpp"
#include "lindblad/rng.hpp"

namespace lindblad {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class Ensemble : int { goe = 1, gue = 2 };

struct EnsembleSpec {
    int beta = 1;
    int n = 2;
    int k = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (beta != 1 && beta != 2) {
            throw Error(ErrorKind::invalid_parameter,
                        "beta must be 1 (orthogonal) or 2 (unitary), got " + std::to_string(beta));
        }
        if (n < 1) throw Error(ErrorKind::invalid_dimension, "n must be >= 1");
        if (k < 1) throw Error(ErrorKind::invalid_parameter, "k must be >= 1");
    }
};

class HermitianMatrix;
inline HermitianMatrix sample_goe(int n, const CounterRng& rng);
inline HermitianMatrix sample_gue(int n, const CounterRng& rng);

/// Dense Hermitian matrix. The stored entries equal their own conjugate
/// transpose bit-for-bit; constructing from a dense matrix checks this.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    static HermitianMatrix from_dense(CMatrix m) {
        if (m.rows() != m.cols() || m.rows() == 0) {
            throw Error(ErrorKind::invalid_dimension, "Hermitian matrix must be square and non-empty");
        }
        if (m != m.adjoint()) {
            throw Error(ErrorKind::unsupported_structure, "matrix is not exactly Hermitian");
        }
        return HermitianMatrix(std::move(m));
    }

    static HermitianMatrix from_real(const RMatrix& m) { return from_dense(m.cast<cplx>()); }

    int n() const noexcept { return static_cast<int>(m_.rows()); }
    const CMatrix& dense() const noexcept { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }

    /// True when every imaginary part is exactly zero (real symmetric).
    bool is_real() const noexcept { return (m_.imag().array() == 0.0).all(); }

private:
    explicit HermitianMatrix(CMatrix m) : m_(std::move(m)) {}
    CMatrix m_;

    friend inline HermitianMatrix sample_goe(int, const CounterRng&);
    friend inline HermitianMatrix sample_gue(int, const CounterRng&);
};

/// Real symmetric matrix with P(H) ~ exp(-(N/2) tr H^2): off-diagonal
/// variance 1/(2N), diagonal variance 1/N. Entry (i, j), i <= j, uses the
/// first deviate of the Gaussian pair at stream index i*n + j.
inline HermitianMatrix sample_goe(int n, const CounterRng& rng) {
    if (n < 1) throw Error(ErrorKind::invalid_dimension, "n must be >= 1");
    const double nn = n;
    const double sd_off = 1.0 / std::sqrt(2.0 * nn);
    const double sd_diag = 1.0 / std::sqrt(nn);
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double z = rng.normal(static_cast<std::uint64_t>(i) * n + j);
            const double v = (i == j ? sd_diag : sd_off) * z;
            m(i, j) = cplx(v, 0.0);
            m(j, i) = cplx(v, 0.0);
        }
    }
    return HermitianMatrix(std::move(m));
}

/// Complex Hermitian matrix with <|H_ij|^2> = 1/(2N) off the diagonal
/// (independent real and imaginary parts, each of variance 1/(4N)) and real
/// diagonal of variance 1/(2N), so the limiting support is [-sqrt2, sqrt2].
inline HermitianMatrix sample_gue(int n, const CounterRng& rng) {
    if (n < 1) throw Error(ErrorKind::invalid_dimension, "n must be >= 1");
    const double nn = n;
    const double sd_part = 1.0 / std::sqrt(4.0 * nn);
    const double sd_diag = 1.0 / std::sqrt(2.0 * nn);
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const auto [z0, z1] = rng.normal_pair(static_cast<std::uint64_t>(i) * n + j);
            if (i == j) {
                m(i, i) = cplx(sd_diag * z0, 0.0);
            } else {
                const cplx v(sd_part * z0, sd_part * z1);
                m(i, j) = v;
                m(j, i) = std::conj(v);
            }
        }
    }
    return HermitianMatrix(std::move(m));
}

inline HermitianMatrix sample_hermitian(int beta, int n, const CounterRng& rng) {
    if (beta == 1) return sample_goe(n, rng);
    if (beta == 2) return sample_gue(n, rng);
    throw Error(ErrorKind::invalid_parameter, "beta must be 1 or 2");
}

/// Hamiltonian, Hermitian jump operators and dissipation strength.
struct LindbladModel {
    HermitianMatrix hamiltonian;
    std::vector<HermitianMatrix> jumps;
    double gamma = 0.0;
    EnsembleSpec spec;

    int n() const noexcept { return hamiltonian.n(); }

    bool is_real() const {
        if (!hamiltonian.is_real()) return false;
        for (const auto& l : jumps) {
            if (!l.is_real()) return false;
        }
        return true;
    }

    void validate() const {
        if (!(gamma >= 0.0)) {
            throw Error(ErrorKind::invalid_parameter,
                        "gamma must be >= 0 (the master equation only relaxes for gamma >= 0)");
        }
        if (jumps.empty()) throw Error(ErrorKind::invalid_parameter, "at least one jump operator required");
        for (const auto& l : jumps) {
            if (l.n() != n()) throw Error(ErrorKind::dimension_mismatch, "jump operator dimension differs from H");
        }
    }
};

/// Draws H (role 0) and L_1..L_k (roles 1..k) independently from the
/// ensemble selected by `spec.beta`.
inline LindbladModel sample_model(const EnsembleSpec& spec, double gamma, const StreamKey& key) {
    spec.validate();
    if (!(gamma >= 0.0)) {
        throw Error(ErrorKind::invalid_parameter,
                    "gamma must be >= 0 (the master equation only relaxes for gamma >= 0)");
    }
    LindbladModel model;
    model.spec = spec;
    model.gamma = gamma;
    model.hamiltonian = sample_hermitian(spec.beta, spec.n, CounterRng(key.with_role(0)));
    model.jumps.reserve(static_cast<std::size_t>(spec.k));
    for (int r = 1; r <= spec.k; ++r) {
        model.jumps.push_back(
            sample_hermitian(spec.beta, spec.n, CounterRng(key.with_role(static_cast<std::uint32_t>(r)))));
    }
    return model;
}

inline LindbladModel sample_model(const EnsembleSpec& spec, double gamma) {
    return sample_model(spec, gamma, StreamKey{spec.seed, 0, 0, 0});
}

/// Assemble a model from explicit matrices (tests, CLI fixtures).
inline LindbladModel make_model(HermitianMatrix h, std::vector<HermitianMatrix> jumps, double gamma) {
    LindbladModel m;
    m.spec.n = h.n();
    m.spec.k = static_cast<int>(jumps.size());
    m.hamiltonian = std::move(h);
    m.jumps = std::move(jumps);
    m.gamma = gamma;
    bool real = m.is_real();
    m.spec.beta = real ? 1 : 2;
    m.validate();
    return m;
}

}  // namespace lindblad
