#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lindblad/error.hpp"
#include "lindblad/io.hpp"
#include "lindblad/lapack.hpp"
#include "lindblad/liouvillian.hpp"

namespace lindblad {

/// Classification thresholds, all relative to scale = max(1, max|L_ij|).
struct Tolerances {
    double zero = 1e-9;
    double real = 1e-9;
    double pair = 1e-7;
};

enum class EigClass { zero, real, pair_lo, pair_hi };

constexpr const char* to_string(EigClass c) noexcept {
    switch (c) {
        case EigClass::zero: return "zero";
        case EigClass::real: return "real";
        case EigClass::pair_lo: return "pair_lo";
        case EigClass::pair_hi: return "pair_hi";
    }
    return "?";
}

struct Spectrum {
    int n = 0;  // base dimension N; there are N^2 eigenvalues
    std::vector<cplx> eigenvalues;
    std::vector<double> residuals;  // NaN when eigenvectors were not computed
    double scale = 1.0;
    double norm = 0.0;              // Frobenius norm of the superoperator

    std::vector<int> zero_modes;
    std::vector<int> real_indices;  // includes zero modes
    std::vector<int> pair_map;      // conjugate partner, or -1 for real eigenvalues
    std::vector<EigClass> classes;

    // Right eigenvectors in LAPACK real-pair layout, Hermitian-basis coordinates.
    std::optional<RMatrix> vr;

    int size() const noexcept { return static_cast<int>(eigenvalues.size()); }
    bool has_vectors() const noexcept { return vr.has_value(); }

    /// Unit-norm right eigenvector `a` in composite-index layout.
    CVector eigenvector(int a) const {
        if (!vr) throw Error(ErrorKind::invalid_parameter, "spectrum was computed without eigenvectors");
        const RMatrix& v = *vr;
        CVector w(v.rows());
        const double im = eigenvalues[static_cast<std::size_t>(a)].imag();
        if (im == 0.0) {
            w = v.col(a).cast<cplx>();
        } else if (im > 0.0) {  // first member of a pair: v = x + i y
            w = v.col(a).cast<cplx>() + cplx(0.0, 1.0) * v.col(a + 1).cast<cplx>();
        } else {
            w = v.col(a - 1).cast<cplx>() - cplx(0.0, 1.0) * v.col(a).cast<cplx>();
        }
        w /= w.norm();
        return from_hermitian_basis(w, n);
    }

    double max_residual() const {
        double m = 0.0;
        for (double r : residuals) m = std::max(m, r);
        return m;
    }
};

/// Thrown when the QR iteration fails. Eigenvalues with index >= failed_at
/// (LAPACK's info) had converged and are carried for diagnostics.
class NonConvergence : public Error {
public:
    NonConvergence(int failed_at, std::vector<cplx> converged)
        : Error(ErrorKind::non_convergence,
                "QR iteration failed to converge; " + std::to_string(converged.size()) + " eigenvalues converged"),
          failed_at_(failed_at), converged_(std::move(converged)) {}

    int failed_at() const noexcept { return failed_at_; }
    const std::vector<cplx>& converged() const noexcept { return converged_; }

private:
    int failed_at_;
    std::vector<cplx> converged_;
};

/// Fills zero_modes / real_indices / pair_map / classes.
inline void classify(Spectrum& s, const Tolerances& tol = {}) {
    const int m = s.size();
    const double zero_tol = tol.zero * s.scale;
    const double real_tol = tol.real * s.scale;
    const double pair_tol = tol.pair * s.scale;
    s.zero_modes.clear();
    s.real_indices.clear();
    s.pair_map.assign(static_cast<std::size_t>(m), -1);
    s.classes.assign(static_cast<std::size_t>(m), EigClass::real);

    std::vector<int> hi, lo;
    for (int a = 0; a < m; ++a) {
        const cplx z = s.eigenvalues[static_cast<std::size_t>(a)];
        if (std::abs(z.imag()) <= real_tol) {
            s.real_indices.push_back(a);
            if (std::abs(z) <= zero_tol) {
                s.zero_modes.push_back(a);
                s.classes[static_cast<std::size_t>(a)] = EigClass::zero;
            }
        } else if (z.imag() > 0.0) {
            hi.push_back(a);
        } else {
            lo.push_back(a);
        }
    }
    if (hi.size() != lo.size()) {
        throw Error(ErrorKind::classification_failure,
                    std::to_string(hi.size()) + " eigenvalues above the real axis but " + std::to_string(lo.size()) +
                        " below");
    }
    std::vector<char> used(static_cast<std::size_t>(m), 0);
    for (int a : hi) {
        const cplx target = std::conj(s.eigenvalues[static_cast<std::size_t>(a)]);
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        // dgeev returns pairs adjacently; try that first
        if (a + 1 < m && s.eigenvalues[static_cast<std::size_t>(a) + 1].imag() < -real_tol &&
            !used[static_cast<std::size_t>(a) + 1]) {
            best = a + 1;
            best_d = std::abs(s.eigenvalues[static_cast<std::size_t>(a) + 1] - target);
        }
        if (best_d > 0.0) {
            for (int b : lo) {
                if (used[static_cast<std::size_t>(b)]) continue;
                const double d = std::abs(s.eigenvalues[static_cast<std::size_t>(b)] - target);
                if (d < best_d) {
                    best_d = d;
                    best = b;
                }
            }
        }
        if (best < 0 || best_d > pair_tol) {
            throw Error(ErrorKind::classification_failure,
                        "eigenvalue " + std::to_string(a) + " has no conjugate partner within tolerance");
        }
        used[static_cast<std::size_t>(best)] = 1;
        s.pair_map[static_cast<std::size_t>(a)] = best;
        s.pair_map[static_cast<std::size_t>(best)] = a;
        s.classes[static_cast<std::size_t>(a)] = EigClass::pair_hi;
        s.classes[static_cast<std::size_t>(best)] = EigClass::pair_lo;
    }
}

struct SpectrumOptions {
    double residual_tol = 1e-10;
    bool vectors = true;
    Tolerances tol{};
};

/// All N^2 eigenvalues of the superoperator.
///
/// The superoperator is first expressed in an orthonormal Hermitian operator
/// basis, where it is a real matrix; the real nonsymmetric eigensolver then
/// returns real eigenvalues with exactly zero imaginary part and complex
/// ones as exact conjugate pairs. With `vectors` the per-pair backward error
/// ||Lv - lambda v|| / ||L||_F (unit v) is checked against `residual_tol`.
inline Spectrum full_spectrum(const Superoperator& sup, const SpectrumOptions& opt = {}) {
    RMatrix m = real_representation(sup);
    Spectrum s;
    s.n = sup.n();
    s.norm = m.norm();
    s.scale = std::max(1.0, sup.max_abs());

    RMatrix work = m;
    auto r = lapack::dgeev(work, opt.vectors);
    const int dim = sup.dim();
    if (r.info > 0) {
        std::vector<cplx> conv;
        for (int a = r.info; a < dim; ++a) {
            conv.emplace_back(r.wr[static_cast<std::size_t>(a)], r.wi[static_cast<std::size_t>(a)]);
        }
        throw NonConvergence(r.info, std::move(conv));
    }
    s.eigenvalues.resize(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        s.eigenvalues[static_cast<std::size_t>(a)] = cplx(r.wr[static_cast<std::size_t>(a)], r.wi[static_cast<std::size_t>(a)]);
    }
    s.residuals.assign(static_cast<std::size_t>(dim), std::numeric_limits<double>::quiet_NaN());
    if (opt.vectors) {
        const RMatrix& v = r.vr;
        const RMatrix mv = m * v;
        const double denom = s.norm > 0.0 ? s.norm : 1.0;
        for (int a = 0; a < dim;) {
            const double wr = r.wr[static_cast<std::size_t>(a)];
            const double wi = r.wi[static_cast<std::size_t>(a)];
            if (wi == 0.0) {
                const double res = (mv.col(a) - wr * v.col(a)).norm() / v.col(a).norm();
                s.residuals[static_cast<std::size_t>(a)] = res / denom;
                ++a;
            } else {
                const auto x = v.col(a);
                const auto y = v.col(a + 1);
                const double re_part = (mv.col(a) - wr * x + wi * y).squaredNorm();
                const double im_part = (mv.col(a + 1) - wi * x - wr * y).squaredNorm();
                const double res = std::sqrt((re_part + im_part) / (x.squaredNorm() + y.squaredNorm()));
                s.residuals[static_cast<std::size_t>(a)] = res / denom;
                s.residuals[static_cast<std::size_t>(a) + 1] = res / denom;
                a += 2;
            }
        }
        s.vr = std::move(r.vr);
        if (s.max_residual() > opt.residual_tol) {
            throw Error(ErrorKind::non_convergence,
                        "eigenpair backward error " + io::fmt(s.max_residual()) + " exceeds " + io::fmt(opt.residual_tol));
        }
    }
    classify(s, opt.tol);
    return s;
}

/// |<v0, vec(1/N)>| for the unique zero mode v0, both normalized.
inline double steady_state_check(const Superoperator& sup, const Spectrum& spec) {
    if (spec.zero_modes.size() != 1) {
        throw Error(ErrorKind::degenerate_steady_state,
                    "expected exactly one zero mode, found " + std::to_string(spec.zero_modes.size()));
    }
    const int n = sup.n();
    const CVector v = spec.eigenvector(spec.zero_modes.front());
    cplx dot(0.0, 0.0);
    for (int i = 0; i < n; ++i) dot += v(composite(i, i, n));
    return std::min(1.0, std::abs(dot) / std::sqrt(static_cast<double>(n)));
}

struct GapReport {
    double gap = std::numeric_limits<double>::quiet_NaN();
    double d23 = std::numeric_limits<double>::quiet_NaN();
    int zero_mode_count = 0;
    std::vector<cplx> slowest_eigenvalues;
};

/// Distinct decay rates (real eigenvalues and the upper member of each
/// conjugate pair) sorted slowest first, zero mode excluded.
inline std::vector<cplx> distinct_decay_modes(const Spectrum& s) {
    std::vector<cplx> out;
    for (int a = 0; a < s.size(); ++a) {
        const auto c = s.classes[static_cast<std::size_t>(a)];
        if (c == EigClass::real || c == EigClass::pair_hi) out.push_back(s.eigenvalues[static_cast<std::size_t>(a)]);
    }
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() < y.imag();
    });
    return out;
}

inline GapReport gap_report(const Spectrum& s) {
    GapReport g;
    g.zero_mode_count = static_cast<int>(s.zero_modes.size());
    if (g.zero_mode_count != 1) {
        throw Error(ErrorKind::degenerate_steady_state,
                    "gap undefined with " + std::to_string(g.zero_mode_count) + " zero modes");
    }
    std::vector<cplx> rest;
    for (int a = 0; a < s.size(); ++a) {
        if (s.classes[static_cast<std::size_t>(a)] != EigClass::zero) rest.push_back(s.eigenvalues[static_cast<std::size_t>(a)]);
    }
    if (rest.empty()) return g;
    std::sort(rest.begin(), rest.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() < y.imag();
    });
    g.gap = std::abs(rest.front().real());
    for (std::size_t a = 0; a < rest.size() && a < 5; ++a) g.slowest_eigenvalues.push_back(rest[a]);
    const auto modes = distinct_decay_modes(s);
    if (modes.size() >= 2) g.d23 = modes[0].real() - modes[1].real();
    return g;
}

/// `index,re,im,residual,class`
inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    os << "index,re,im,residual,class\n";
    for (int a = 0; a < s.size(); ++a) {
        const cplx z = s.eigenvalues[static_cast<std::size_t>(a)];
        const double res = s.residuals.empty() ? std::numeric_limits<double>::quiet_NaN()
                                               : s.residuals[static_cast<std::size_t>(a)];
        os << a << ',' << io::fmt(z.real()) << ',' << io::fmt(z.imag()) << ',' << io::fmt(res) << ','
           << to_string(s.classes.empty() ? EigClass::real : s.classes[static_cast<std::size_t>(a)]) << '\n';
    }
}

}  // namespace lindblad
