#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "lindblad/error.hpp"
#include "lindblad/liouvillian.hpp"
#include "lindblad/rmt.hpp"
#include "lindblad/stats.hpp"

namespace lindblad {

enum class EffectiveVariant { bare, regularized };

/// Strong-dissipation population-sector generator A' in the L eigenbasis.
/// A classical Markov generator: nonnegative off-diagonal rates, zero row
/// sums, symmetric.
struct EffectiveModel {
    RMatrix a_prime;
    std::vector<double> kappas;  // L eigenvalues, ascending
    RMatrix taus;                // tau_ab = H_bb - H_aa (regularized variant only)
    EffectiveVariant variant = EffectiveVariant::regularized;
    double gamma = 0.0;

    int n() const noexcept { return static_cast<int>(a_prime.rows()); }
};

inline constexpr double kKappaDegeneracy = 1e-12;

/// Second-order rates between L-populations a != b, with
/// Delta = kappa_a - kappa_b:
///   bare:         (4/gamma) |H_ab|^2 / Delta^2
///   regularized:  (4/gamma) |H_ab|^2 Delta^2 / (Delta^4 + (2/gamma)^2 tau_ab^2)
/// where the regularized form keeps the first-order imaginary shift tau_ab of
/// the intermediate coherence.
inline EffectiveModel build_effective(const LindbladModel& model, EffectiveVariant variant = EffectiveVariant::regularized) {
    model.validate();
    if (model.jumps.size() != 1) {
        throw Error(ErrorKind::unsupported_structure, "effective model requires exactly one jump operator");
    }
    if (!(model.gamma > 0.0)) throw Error(ErrorKind::invalid_parameter, "effective model requires gamma > 0");
    const int n = model.n();
    const double g = model.gamma;

    CMatrix v;
    std::vector<double> kappas(static_cast<std::size_t>(n));
    if (model.jumps[0].is_real()) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(model.jumps[0].dense().real());
        v = es.eigenvectors().cast<cplx>();
        for (int a = 0; a < n; ++a) kappas[static_cast<std::size_t>(a)] = es.eigenvalues()(a);
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(model.jumps[0].dense());
        v = es.eigenvectors();
        for (int a = 0; a < n; ++a) kappas[static_cast<std::size_t>(a)] = es.eigenvalues()(a);
    }
    const CMatrix h = v.adjoint() * model.hamiltonian.dense() * v;

    EffectiveModel em;
    em.variant = variant;
    em.gamma = g;
    em.kappas = kappas;
    em.a_prime = RMatrix::Zero(n, n);
    if (variant == EffectiveVariant::regularized) em.taus = RMatrix::Zero(n, n);

    const double reg = (2.0 / g) * (2.0 / g);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double delta = kappas[static_cast<std::size_t>(a)] - kappas[static_cast<std::size_t>(b)];
            const double h2 = std::norm(h(a, b));
            double rate = 0.0;
            if (variant == EffectiveVariant::bare) {
                if (std::abs(delta) < kKappaDegeneracy) {
                    throw Error(ErrorKind::singular_denominator,
                                "degenerate L eigenvalues; use the regularized effective model");
                }
                rate = 4.0 / g * h2 / (delta * delta);
            } else {
                const double tau = h(b, b).real() - h(a, a).real();
                em.taus(a, b) = tau;
                em.taus(b, a) = -tau;
                const double d2 = delta * delta;
                const double denom = d2 * d2 + reg * tau * tau;
                rate = denom > 0.0 ? 4.0 / g * h2 * d2 / denom : 0.0;
            }
            em.a_prime(a, b) = rate;
            em.a_prime(b, a) = rate;
        }
    }
    for (int a = 0; a < n; ++a) em.a_prime(a, a) = -em.a_prime.row(a).sum();
    return em;
}

/// Eigenvalues of A', nonincreasing (the first is the zero mode).
inline std::vector<double> effective_spectrum(const EffectiveModel& em) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(em.a_prime, Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// |lambda_n + 2n/gamma| * gamma/2 for n = 0..n_max, lambda_n being the
/// (n+1)-th eigenvalue of the nonincreasing spectrum.
inline std::vector<double> compare_chebyshev(const std::vector<double>& spectrum, double gamma, int n_max) {
    if (n_max < 0 || n_max >= static_cast<int>(spectrum.size())) {
        throw Error(ErrorKind::index_out_of_range, "n_max must be below N");
    }
    if (!(gamma > 0.0)) throw Error(ErrorKind::invalid_parameter, "gamma must be > 0");
    std::vector<double> dev(static_cast<std::size_t>(n_max) + 1);
    for (int k = 0; k <= n_max; ++k) {
        dev[static_cast<std::size_t>(k)] = std::abs(spectrum[static_cast<std::size_t>(k)] + 2.0 * k / gamma) * gamma / 2.0;
    }
    return dev;
}

/// One peak of the ensemble-averaged A' density, identified with the
/// distribution of the n-th nonzero eigenvalue across realizations.
struct EffectivePeak {
    int mode = 0;
    double center = 0.0;      // median of the n-th eigenvalue
    double predicted = 0.0;   // -2n/gamma
    double rel_offset = 0.0;  // |center - predicted| / |predicted|
    double iqr = 0.0;
    double separation = 0.0;  // (gap to the next peak) / (mean IQR of both)
    bool resolved = false;    // separation > 1
};

/// Peaks for modes 1..n_max from per-realization nonincreasing spectra.
inline std::vector<EffectivePeak> effective_peaks(const std::vector<std::vector<double>>& spectra, double gamma,
                                                  int n_max) {
    if (spectra.empty()) throw Error(ErrorKind::insufficient_data, "no spectra");
    std::vector<EffectivePeak> peaks;
    std::vector<std::vector<double>> by_mode(static_cast<std::size_t>(n_max) + 2);
    for (const auto& s : spectra) {
        for (int k = 1; k <= n_max + 1 && k < static_cast<int>(s.size()); ++k) {
            by_mode[static_cast<std::size_t>(k)].push_back(s[static_cast<std::size_t>(k)]);
        }
    }
    for (auto& v : by_mode) std::sort(v.begin(), v.end());
    for (int k = 1; k <= n_max; ++k) {
        const auto& cur = by_mode[static_cast<std::size_t>(k)];
        if (cur.empty()) break;
        EffectivePeak p;
        p.mode = k;
        p.center = quantile_sorted(cur, 0.5);
        p.predicted = -2.0 * k / gamma;
        p.rel_offset = std::abs(p.center - p.predicted) / std::abs(p.predicted);
        p.iqr = quantile_sorted(cur, 0.75) - quantile_sorted(cur, 0.25);
        const auto& next = by_mode[static_cast<std::size_t>(k) + 1];
        if (!next.empty()) {
            const double next_iqr = quantile_sorted(next, 0.75) - quantile_sorted(next, 0.25);
            const double gap = p.center - quantile_sorted(next, 0.5);
            const double width = 0.5 * (p.iqr + next_iqr);
            p.separation = width > 0.0 ? gap / width : std::numeric_limits<double>::infinity();
            p.resolved = p.separation > 1.0;
        }
        peaks.push_back(p);
    }
    return peaks;
}

/// Number of consecutive resolved peaks starting from mode 1.
inline int resolved_peak_count(const std::vector<EffectivePeak>& peaks) {
    int c = 0;
    for (const auto& p : peaks) {
        if (!p.resolved) break;
        ++c;
    }
    return c;
}

}  // namespace lindblad
