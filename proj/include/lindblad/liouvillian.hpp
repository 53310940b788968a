#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lindblad/error.hpp"
#include "lindblad/rmt.hpp"

namespace lindblad {

// Vectorization convention (used everywhere in the library):
//   rho(i, j)  <->  v[i * N + j]
// i.e. row-major composite index, the second index being the side that
// multiplies from the right (the "conjugated" side of a ket-bra |i><j|).
// With this convention vec(A rho B) = (A (x) B^T) vec(rho), so the commutator
// superoperator is C_M = M (x) 1 - 1 (x) M^T.

inline constexpr int kDefaultDenseCap = 4096;

inline int composite(int i, int j, int n) noexcept { return i * n + j; }

inline CVector vectorize(const CMatrix& rho) {
    const int n = static_cast<int>(rho.rows());
    CVector v(static_cast<Eigen::Index>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) v(composite(i, j, n)) = rho(i, j);
    }
    return v;
}

inline CMatrix unvectorize(const CVector& v, int n) {
    if (v.size() != static_cast<Eigen::Index>(n) * n) {
        throw Error(ErrorKind::dimension_mismatch, "vector length is not n^2");
    }
    CMatrix rho(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) rho(i, j) = v(composite(i, j, n));
    }
    return rho;
}

/// Dense N^2 x N^2 Lindblad superoperator. Immutable once built.
class Superoperator {
public:
    Superoperator(CMatrix dense, int n, double gamma, EnsembleSpec spec, bool real_model)
        : dense_(std::move(dense)), n_(n), gamma_(gamma), spec_(spec), real_model_(real_model) {}

    int n() const noexcept { return n_; }
    int dim() const noexcept { return n_ * n_; }
    double gamma() const noexcept { return gamma_; }
    const EnsembleSpec& spec() const noexcept { return spec_; }
    const CMatrix& dense() const noexcept { return dense_; }
    /// H and every L_k are real symmetric.
    bool real_model() const noexcept { return real_model_; }

    cplx operator()(int i, int j, int k, int l) const {
        return dense_(composite(i, j, n_), composite(k, l, n_));
    }

    double max_abs() const { return dense_.cwiseAbs().maxCoeff(); }

private:
    CMatrix dense_;
    int n_;
    double gamma_;
    EnsembleSpec spec_;
    bool real_model_;
};

namespace detail {

// Exact Hermitian square: the upper triangle is computed and mirrored so the
// result is Hermitian bit-for-bit.
inline CMatrix hermitian_square(const CMatrix& m) {
    CMatrix sq = m * m;
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        sq(i, i) = cplx(sq(i, i).real(), 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) sq(j, i) = std::conj(sq(i, j));
    }
    return sq;
}

}  // namespace detail

/// Builds
///   L_{ij_kl} = -i H_ik d_jl + i d_ik H_lj
///               - (gamma/2) sum_k [ (L^2)_ik d_jl + d_ik (L^2)_lj - 2 L_ik L_lj ],
/// which for real symmetric H, L is the familiar component form and equals
/// -i C_H - (gamma/2) sum_k C_{L_k}^2 in general.
inline Superoperator build_superoperator(const LindbladModel& model, int dense_cap = kDefaultDenseCap) {
    model.validate();
    const int n = model.n();
    const long dim = static_cast<long>(n) * n;
    if (dim > dense_cap) {
        throw Error(ErrorKind::capacity,
                    "N^2 = " + std::to_string(dim) + " exceeds the dense cap " + std::to_string(dense_cap) +
                        "; use the matrix-free apply() instead");
    }
    const CMatrix& h = model.hamiltonian.dense();
    const double g2 = 0.5 * model.gamma;
    const cplx I(0.0, 1.0);

    std::vector<CMatrix> sq;
    sq.reserve(model.jumps.size());
    for (const auto& l : model.jumps) sq.push_back(detail::hermitian_square(l.dense()));

    CMatrix s = CMatrix::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int row = composite(i, j, n);
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    cplx coherent(0.0, 0.0);
                    if (j == l) coherent -= I * h(i, k);
                    if (i == k) coherent += I * h(l, j);
                    cplx diss(0.0, 0.0);
                    for (std::size_t q = 0; q < model.jumps.size(); ++q) {
                        const CMatrix& lm = model.jumps[q].dense();
                        cplx left = (j == l) ? sq[q](i, k) : cplx(0.0, 0.0);
                        cplx right = (i == k) ? sq[q](l, j) : cplx(0.0, 0.0);
                        diss += (left + right) - 2.0 * (lm(i, k) * lm(l, j));
                    }
                    s(row, composite(k, l, n)) = coherent - g2 * diss;
                }
            }
        }
    }
    return Superoperator(std::move(s), n, model.gamma, model.spec, model.is_real());
}

/// Matrix-free action -i[H, rho] - (gamma/2) sum_k [L_k, [L_k, rho]], O(k N^3).
inline CMatrix apply(const LindbladModel& model, const CMatrix& rho) {
    const int n = model.n();
    if (rho.rows() != n || rho.cols() != n) {
        throw Error(ErrorKind::dimension_mismatch,
                    "rho is " + std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) + ", model has N=" +
                        std::to_string(n));
    }
    const CMatrix& h = model.hamiltonian.dense();
    CMatrix out = cplx(0.0, -1.0) * (h * rho - rho * h);
    for (const auto& jump : model.jumps) {
        const CMatrix& l = jump.dense();
        const CMatrix c = l * rho - rho * l;
        out.noalias() -= (0.5 * model.gamma) * (l * c - c * l);
    }
    return out;
}

/// Superoperator blocks in the population / upper-coherence / lower-coherence
/// ordering: rows and columns ordered as (ii), (ij, i<j), (ji, i<j):
///
///     [ A    B    B* ]
///     [ B^T  C    D  ]
///     [ B^+  D*   C* ]
struct BlockForm {
    int n = 0;
    RMatrix a_block;                          // N x N, real symmetric
    CMatrix b_block;                          // N x M
    CMatrix c_block;                          // M x M, complex symmetric
    CMatrix d_block;                          // M x M, Hermitian
    std::vector<std::pair<int, int>> pairs;   // coherence index -> (i, j), i < j

    int coherence_count() const noexcept { return static_cast<int>(pairs.size()); }

    /// Composite superoperator index for position `p` of the block ordering.
    int composite_of(int p) const {
        const int m = coherence_count();
        if (p < n) return composite(p, p, n);
        if (p < n + m) {
            const auto [i, j] = pairs[static_cast<std::size_t>(p - n)];
            return composite(i, j, n);
        }
        const auto [i, j] = pairs[static_cast<std::size_t>(p - n - m)];
        return composite(j, i, n);
    }

    /// Dense superoperator in composite-index order rebuilt from the blocks.
    CMatrix reassemble() const {
        const int m = coherence_count();
        const int dim = n * n;
        CMatrix blocked(dim, dim);
        blocked.block(0, 0, n, n) = a_block.cast<cplx>();
        blocked.block(0, n, n, m) = b_block;
        blocked.block(0, n + m, n, m) = b_block.conjugate();
        blocked.block(n, 0, m, n) = b_block.transpose();
        blocked.block(n, n, m, m) = c_block;
        blocked.block(n, n + m, m, m) = d_block;
        blocked.block(n + m, 0, m, n) = b_block.adjoint();
        blocked.block(n + m, n, m, m) = d_block.conjugate();
        blocked.block(n + m, n + m, m, m) = c_block.conjugate();
        CMatrix out(dim, dim);
        for (int p = 0; p < dim; ++p) {
            for (int q = 0; q < dim; ++q) out(composite_of(p), composite_of(q)) = blocked(p, q);
        }
        return out;
    }
};

inline BlockForm block_form(const Superoperator& sup) {
    if (!sup.real_model()) {
        throw Error(ErrorKind::unsupported_structure,
                    "block form requires real symmetric H and L (orthogonal ensemble)");
    }
    BlockForm bf;
    bf.n = sup.n();
    const int n = bf.n;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) bf.pairs.emplace_back(i, j);
    }
    const int m = bf.coherence_count();
    const CMatrix& s = sup.dense();
    auto at = [&](int p, int q) { return s(bf.composite_of(p), bf.composite_of(q)); };
    bf.a_block.resize(n, n);
    bf.b_block.resize(n, m);
    bf.c_block.resize(m, m);
    bf.d_block.resize(m, m);
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) bf.a_block(p, q) = at(p, q).real();
        for (int q = 0; q < m; ++q) bf.b_block(p, q) = at(p, n + q);
    }
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            bf.c_block(p, q) = at(n + p, n + q);
            bf.d_block(p, q) = at(n + p, n + m + q);
        }
    }
    return bf;
}

/// Orthonormal Hermitian basis of operator space, ordered as the N
/// populations |i><i| followed, for each pair i < j, by
///   S_ij = (|i><j| + |j><i|)/sqrt2  and  A_ij = (-i|i><j| + i|j><i|)/sqrt2.
/// Because the superoperator preserves Hermiticity its matrix in this basis
/// is real; the conjugation symmetry of the spectrum becomes manifest.
inline RMatrix real_representation(const Superoperator& sup) {
    const int n = sup.n();
    const int dim = sup.dim();
    const CMatrix& s = sup.dense();
    const double r = 1.0 / std::sqrt(2.0);
    const cplx I(0.0, 1.0);

    // basis column b as (composite index, coefficient) pairs
    struct Term {
        int idx;
        cplx c;
    };
    std::vector<std::array<Term, 2>> basis;
    std::vector<int> width;
    basis.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < n; ++i) {
        basis.push_back({Term{composite(i, i, n), 1.0}, Term{0, 0.0}});
        width.push_back(1);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            basis.push_back({Term{composite(i, j, n), r}, Term{composite(j, i, n), r}});
            width.push_back(2);
            basis.push_back({Term{composite(i, j, n), -I * r}, Term{composite(j, i, n), I * r}});
            width.push_back(2);
        }
    }

    // T = S U (column combinations), then M = Re(U^+ T).
    CMatrix t(dim, dim);
    for (int b = 0; b < dim; ++b) {
        const auto& tb = basis[static_cast<std::size_t>(b)];
        if (width[static_cast<std::size_t>(b)] == 1) {
            t.col(b) = s.col(tb[0].idx);
        } else {
            t.col(b) = tb[0].c * s.col(tb[0].idx) + tb[1].c * s.col(tb[1].idx);
        }
    }
    RMatrix out(dim, dim);
    for (int a = 0; a < dim; ++a) {
        const auto& ta = basis[static_cast<std::size_t>(a)];
        if (width[static_cast<std::size_t>(a)] == 1) {
            out.row(a) = t.row(ta[0].idx).real();
        } else {
            out.row(a) = (std::conj(ta[0].c) * t.row(ta[0].idx) + std::conj(ta[1].c) * t.row(ta[1].idx)).real();
        }
    }
    return out;
}

/// Maps a composite-index vector into the Hermitian-basis coordinates used by
/// real_representation() (and back).
inline CVector to_hermitian_basis(const CVector& v, int n) {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx I(0.0, 1.0);
    CVector out(v.size());
    int b = 0;
    for (int i = 0; i < n; ++i) out(b++) = v(composite(i, i, n));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const cplx x = v(composite(i, j, n));
            const cplx y = v(composite(j, i, n));
            out(b++) = r * (x + y);
            out(b++) = r * (I * x - I * y);
        }
    }
    return out;
}

inline CVector from_hermitian_basis(const CVector& w, int n) {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx I(0.0, 1.0);
    CVector out(w.size());
    int b = 0;
    for (int i = 0; i < n; ++i) out(composite(i, i, n)) = w(b++);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const cplx s = w(b++);
            const cplx a = w(b++);
            out(composite(i, j, n)) = r * (s - I * a);
            out(composite(j, i, n)) = r * (s + I * a);
        }
    }
    return out;
}

struct EigenbasisOf {
    enum class Which { hamiltonian, jump } which = Which::hamiltonian;
    int jump_index = 0;
};

using BasisChoice = std::variant<EigenbasisOf, CMatrix>;

namespace detail {

inline HermitianMatrix conjugate_by(const CMatrix& v, const HermitianMatrix& m, bool keep_real) {
    CMatrix t = v.adjoint() * m.dense() * v;
    const Eigen::Index n = t.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        t(i, i) = cplx(t(i, i).real(), 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) t(j, i) = std::conj(t(i, j));
    }
    if (keep_real) t = t.real().cast<cplx>();
    return HermitianMatrix::from_dense(std::move(t));
}

}  // namespace detail

/// Conjugates H and every L_k by a unitary (orthogonal for real models)
/// change of basis V: M -> V^+ M V. The superoperator spectrum is invariant.
inline LindbladModel transform_basis(const LindbladModel& model, const BasisChoice& basis) {
    const int n = model.n();
    CMatrix v;
    if (const auto* eb = std::get_if<EigenbasisOf>(&basis)) {
        const HermitianMatrix* target = &model.hamiltonian;
        if (eb->which == EigenbasisOf::Which::jump) {
            if (eb->jump_index < 0 || eb->jump_index >= static_cast<int>(model.jumps.size())) {
                throw Error(ErrorKind::index_out_of_range, "jump index out of range");
            }
            target = &model.jumps[static_cast<std::size_t>(eb->jump_index)];
        }
        if (target->is_real()) {
            Eigen::SelfAdjointEigenSolver<RMatrix> es(target->dense().real());
            v = es.eigenvectors().cast<cplx>();
        } else {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(target->dense());
            v = es.eigenvectors();
        }
    } else {
        v = std::get<CMatrix>(basis);
        if (v.rows() != n || v.cols() != n) throw Error(ErrorKind::dimension_mismatch, "basis matrix is not N x N");
        const double dev = (v.adjoint() * v - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
        if (!(dev <= 1e-12)) {
            throw Error(ErrorKind::non_orthogonal_basis,
                        "basis deviates from orthogonality by " + std::to_string(dev));
        }
    }
    const bool keep_real = model.is_real() && (v.imag().array() == 0.0).all();
    LindbladModel out;
    out.spec = model.spec;
    out.gamma = model.gamma;
    out.hamiltonian = detail::conjugate_by(v, model.hamiltonian, keep_real);
    out.jumps.reserve(model.jumps.size());
    for (const auto& l : model.jumps) out.jumps.push_back(detail::conjugate_by(v, l, keep_real));
    return out;
}

}  // namespace lindblad
