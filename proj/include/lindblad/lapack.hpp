#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include <unistd.h>

#include <lapacke.h>

#include "lindblad/error.hpp"
#include "lindblad/rmt.hpp"

#if defined(LINDBLAD_HAVE_OPENBLAS)
extern "C" void openblas_set_num_threads(int);
extern "C" char* openblas_get_corename(void);
#endif

namespace lindblad::lapack {

/// Pins the BLAS backend to one thread so results do not depend on the
/// backend's internal work split.
inline void use_single_thread() noexcept {
#if defined(LINDBLAD_HAVE_OPENBLAS)
    openblas_set_num_threads(1);
#endif
}

struct GeevResult {
    std::vector<double> wr, wi;
    RMatrix vr;  // empty unless vectors were requested
    int info = 0;
};

/// Real nonsymmetric eigenproblem (dgeev: balancing, Hessenberg reduction,
/// shifted QR, back-substitution). `a` is overwritten.
inline GeevResult dgeev(RMatrix& a, bool vectors) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    GeevResult r;
    r.wr.resize(static_cast<std::size_t>(n));
    r.wi.resize(static_cast<std::size_t>(n));
    double dummy = 0.0;
    if (vectors) r.vr.resize(n, n);
    r.info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, a.data(), n, r.wr.data(), r.wi.data(),
                           &dummy, 1, vectors ? r.vr.data() : &dummy, vectors ? n : 1);
    if (r.info < 0) {
        throw Error(ErrorKind::invalid_parameter, "dgeev: illegal argument " + std::to_string(-r.info));
    }
    return r;
}

/// Backward error of dgeev on a fixed dense 160x160 problem, scaled by the
/// matrix norm. A healthy backend gives ~1e-15.
inline double backend_self_check() {
    const int n = 160;
    RMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = std::sin(0.7 * i + 1.3 * j + 0.01 * i * j);
    }
    RMatrix w = m;
    const auto r = dgeev(w, true);
    if (r.info != 0) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (int a = 0; a < n;) {
        const auto x = r.vr.col(a);
        if (r.wi[static_cast<std::size_t>(a)] == 0.0) {
            worst = std::max(worst, (m * x - r.wr[static_cast<std::size_t>(a)] * x).norm() / x.norm());
            ++a;
        } else {
            const auto y = r.vr.col(a + 1);
            const double wr = r.wr[static_cast<std::size_t>(a)], wi = r.wi[static_cast<std::size_t>(a)];
            const double e = std::hypot((m * x - wr * x + wi * y).norm(), (m * y - wi * x - wr * y).norm());
            worst = std::max(worst, e / std::hypot(x.norm(), y.norm()));
            a += 2;
        }
    }
    return worst / m.norm();
}

/// OpenBLAS 0.3.20 selects its Cooperlake kernels on Cooperlake-class CPUs,
/// and those return wrong eigenvectors for problems above ~100. The core type
/// is read once at library load, so the fix is to restart the process with
/// OPENBLAS_CORETYPE pinned to the SkylakeX kernels. No-op when the variable
/// is already set or another core was selected. Call first thing in main().
inline void ensure_reliable_backend([[maybe_unused]] char** argv) {
#if defined(LINDBLAD_HAVE_OPENBLAS) && defined(__linux__)
    if (std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
    const char* core = openblas_get_corename();
    if (core == nullptr || std::strcmp(core, "Cooperlake") != 0) return;
    ::setenv("OPENBLAS_CORETYPE", "SkylakeX", 1);
    ::execv("/proc/self/exe", argv);
#endif
}

}  // namespace lindblad::lapack
