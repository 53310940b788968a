#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lindblad/error.hpp"
#include "lindblad/io.hpp"
#include "lindblad/rmt.hpp"
#include "lindblad/special.hpp"

namespace lindblad::theory {

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kPi = std::numbers::pi;

/// A nonnegative density on [lo, hi] with known total mass.
struct DensityCurve {
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> eval;
    double normalization = 1.0;

    double operator()(double x) const { return (x < lo || x > hi) ? 0.0 : eval(x); }
};

// ---------------------------------------------------------------------------
// Semicircle

/// Level density nu(kappa) = (N/pi) sqrt(2 - kappa^2) on [-sqrt2, sqrt2].
inline double semicircle_density(double kappa, int n) {
    const double r = 2.0 - kappa * kappa;
    return r <= 0.0 ? 0.0 : (n / kPi) * std::sqrt(r);
}

inline DensityCurve semicircle_curve(int n) {
    return {-kSqrt2, kSqrt2, [n](double k) { return semicircle_density(k, n); }, static_cast<double>(n)};
}

// ---------------------------------------------------------------------------
// Imaginary-axis density at weak dissipation: the distribution of the
// difference of two independent semicircle variables (support |y| <= 2 sqrt2).

inline constexpr double kImagSupport = 2.0 * kSqrt2;

inline double imag_density_f(double y) {
    const double t = std::abs(y);
    if (t >= kImagSupport) return 0.0;
    if (t == 0.0) return 8.0 * kSqrt2 / (3.0 * kPi * kPi);
    const double a = kImagSupport;
    // parameter m = ((a - t)/(a + t))^2, complement 1 - m = 4 a t / (a + t)^2
    const double mc = 4.0 * a * t / ((a + t) * (a + t));
    const auto ke = special::complete_elliptic_mc(mc);
    const double brace = (8.0 + t * t) * ke.e - std::pow(2.0, 2.5) * t * ke.k;
    return std::max(0.0, (a + t) / (6.0 * kPi * kPi) * brace);
}

inline DensityCurve imag_density_curve() { return {-kImagSupport, kImagSupport, imag_density_f, 1.0}; }

namespace detail {

// P(|Y| <= node) on a uniform grid, built once; lookups add one short
// Gauss-Legendre piece from the node below.
struct ImagAbsCdfTable {
    static constexpr int kPanels = 1024;
    double h = kImagSupport / kPanels;
    std::array<double, kPanels + 1> cum{};

    ImagAbsCdfTable() {
        using boost::math::quadrature::gauss_kronrod;
        for (int i = 0; i < kPanels; ++i) {
            cum[static_cast<std::size_t>(i) + 1] =
                cum[static_cast<std::size_t>(i)] +
                2.0 * gauss_kronrod<double, 31>::integrate(imag_density_f, i * h, (i + 1) * h, 8, 1e-14);
        }
    }
};

inline const ImagAbsCdfTable& imag_abs_cdf_table() {
    static const ImagAbsCdfTable table;
    return table;
}

}  // namespace detail

/// P(|Y| <= s) for Y distributed with density f.
inline double imag_abs_cdf(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= kImagSupport) return 1.0;
    const auto& t = detail::imag_abs_cdf_table();
    const int i = std::min(static_cast<int>(s / t.h), detail::ImagAbsCdfTable::kPanels - 1);
    const double lo = i * t.h;
    double v = t.cum[static_cast<std::size_t>(i)];
    if (s > lo) v += 2.0 * boost::math::quadrature::gauss<double, 20>::integrate(imag_density_f, lo, s);
    return std::min(1.0, v);
}

inline double imag_cdf(double y) {
    const double half = 0.5 * imag_abs_cdf(std::abs(y));
    return y < 0.0 ? 0.5 - half : 0.5 + half;
}

// ---------------------------------------------------------------------------
// Real-axis density of the unperturbed L-coherences at strong dissipation,
// x = -(gamma/2)(kappa_i - kappa_j)^2, supported on [-4 gamma, 0).

inline double large_gamma_x_density(double x, double gamma) {
    if (!(gamma > 0.0)) throw Error(ErrorKind::invalid_parameter, "gamma must be > 0");
    if (x >= 0.0 || x < -4.0 * gamma) return 0.0;
    const double ax = -x;
    return std::sqrt(2.0 / (gamma * ax)) * imag_density_f(std::sqrt(2.0 * ax / gamma));
}

inline DensityCurve large_gamma_x_curve(double gamma) {
    if (!(gamma > 0.0)) throw Error(ErrorKind::invalid_parameter, "gamma must be > 0");
    return {-4.0 * gamma, 0.0, [gamma](double x) { return large_gamma_x_density(x, gamma); }, 1.0};
}

/// P(X <= x); X = -(gamma/2) Y^2 maps the CDF onto that of |Y|.
inline double large_gamma_x_cdf(double x, double gamma) {
    if (!(gamma > 0.0)) throw Error(ErrorKind::invalid_parameter, "gamma must be > 0");
    if (x >= 0.0) return 1.0;
    if (x <= -4.0 * gamma) return 0.0;
    return 1.0 - imag_abs_cdf(std::sqrt(-2.0 * x / gamma));
}

inline constexpr double large_gamma_x_mean(double gamma) { return -0.5 * gamma; }
inline double large_gamma_x_std(double gamma) { return std::sqrt(3.0 / 8.0) * gamma; }

// ---------------------------------------------------------------------------
// Chebyshev modes of the strong-dissipation population sector

inline double chebyshev_eigenvalue(int n, double gamma) {
    if (n < 0) throw Error(ErrorKind::invalid_parameter, "mode index must be >= 0");
    if (!(gamma > 0.0)) throw Error(ErrorKind::invalid_parameter, "gamma must be > 0");
    return -2.0 * n / gamma;
}

/// U_n(kappa / sqrt2) by the three-term recurrence.
inline double chebyshev_mode(int n, double kappa) {
    if (n < 0) throw Error(ErrorKind::invalid_parameter, "mode index must be >= 0");
    const double x = kappa / kSqrt2;
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 2.0 * x;
    for (int m = 2; m <= n; ++m) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Small-gap exponent and golden-rule rate

/// P(Delta) ~ Delta^e with e = (beta k / 2)(N - 1) - 1. Exact for all
/// admissible inputs since e is a multiple of 1/2.
inline double gap_exponent(int beta, int k, int n) {
    if (beta != 1 && beta != 2 && beta != 4) throw Error(ErrorKind::invalid_parameter, "beta must be 1, 2 or 4");
    if (k < 1) throw Error(ErrorKind::invalid_parameter, "k must be >= 1");
    if (n < 2) throw Error(ErrorKind::invalid_dimension, "gap exponent needs N >= 2");
    return 0.5 * beta * k * (n - 1) - 1.0;
}

/// Gamma_n = sum_{m != n} |<n|L|m>|^2 for every eigenstate of H, ordered by
/// ascending energy.
inline std::vector<double> golden_rule_rates(const HermitianMatrix& h, const HermitianMatrix& l) {
    if (h.n() != l.n()) throw Error(ErrorKind::dimension_mismatch, "H and L differ in size");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.dense());
    const CMatrix& v = es.eigenvectors();
    const CMatrix lh = v.adjoint() * l.dense() * v;
    std::vector<double> rates(static_cast<std::size_t>(h.n()), 0.0);
    for (int a = 0; a < h.n(); ++a) {
        double s = 0.0;
        for (int b = 0; b < h.n(); ++b) {
            if (b != a) s += std::norm(lh(a, b));
        }
        rates[static_cast<std::size_t>(a)] = s;
    }
    return rates;
}

inline double golden_rule_rate(const HermitianMatrix& h, const HermitianMatrix& l, int n) {
    if (n < 0 || n >= h.n()) throw Error(ErrorKind::index_out_of_range, "eigenstate index out of range");
    return golden_rule_rates(h, l)[static_cast<std::size_t>(n)];
}

// ---------------------------------------------------------------------------
// Mean-field master equation
//   d rho/dt = -i[H, rho] - (gamma/2)[rho - tr(rho) 1/N + (rho - rho^*)/N]
// (the identity term carries tr(rho) so the map is linear; it coincides with
// the physical form for unit-trace rho).

inline CMatrix mean_field_apply(const HermitianMatrix& h, double gamma, const CMatrix& rho) {
    const int n = h.n();
    if (rho.rows() != n || rho.cols() != n) throw Error(ErrorKind::dimension_mismatch, "rho has wrong dimension");
    const CMatrix& hm = h.dense();
    const cplx tr = rho.trace();
    CMatrix diss = rho + (rho - rho.conjugate()) / static_cast<double>(n);
    diss.diagonal().array() -= tr / static_cast<double>(n);
    return cplx(0.0, -1.0) * (hm * rho - rho * hm) - (0.5 * gamma) * diss;
}

// ---------------------------------------------------------------------------
// Weak-dissipation form factor F(t) = <sum_a exp(lambda_a t)>

struct FormFactorPrediction {
    double population = 0.0;
    double coherence = 0.0;
    double total() const noexcept { return population + coherence; }
};

/// `k_of_t` is the Hamiltonian form factor <|sum_alpha exp(-i E_alpha t)|^2>.
/// Population sector: 1 + (N-1) e^{-gamma t/2}. Coherence sector:
/// (K(t) - N)(1 + 2 gamma t/N)^{-1/2}(1 + gamma t/N)^{-1/2}(1 + gamma t/(2N))^{-(N-2)}.
inline FormFactorPrediction form_factor_prediction(double t, int n, double gamma, double k_of_t) {
    if (t < 0.0) throw Error(ErrorKind::invalid_parameter, "t must be >= 0");
    const double nn = n;
    FormFactorPrediction p;
    p.population = 1.0 + (nn - 1.0) * std::exp(-0.5 * gamma * t);
    p.coherence = (k_of_t - nn) / std::sqrt(1.0 + 2.0 * gamma * t / nn) / std::sqrt(1.0 + gamma * t / nn) *
                  std::pow(1.0 + gamma * t / (2.0 * nn), -(nn - 2.0));
    return p;
}

/// |sum_alpha exp(-i E_alpha t)|^2 for one spectrum.
inline double hamiltonian_form_factor(std::span<const double> energies, double t) {
    cplx s(0.0, 0.0);
    for (double e : energies) s += std::polar(1.0, -e * t);
    return std::norm(s);
}

// ---------------------------------------------------------------------------
// Weak-dissipation population block in the H eigenbasis:
//   A_{ii_jj} = -gamma [ (L^2)_ii delta_ij - |L_ij|^2 ]

inline RMatrix small_gamma_population_block(const HermitianMatrix& h, const HermitianMatrix& l, double gamma) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.dense());
    const CMatrix& v = es.eigenvectors();
    const CMatrix lh = v.adjoint() * l.dense() * v;
    const int n = h.n();
    RMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            a(i, j) = gamma * std::norm(lh(i, j));
            row += a(i, j);
        }
        a(i, i) = -row;
    }
    return a;
}

inline double population_diag_mean(double gamma, int n) { return -gamma * (n - 1.0) / (2.0 * n); }
inline double population_diag_std(double gamma, int n) {
    return gamma * std::sqrt((n - 1.0) / (2.0 * n * static_cast<double>(n)));
}

/// First-order width of the coherence real parts at weak dissipation.
inline double small_gamma_real_width(double gamma, int n) { return gamma / (2.0 * std::sqrt(static_cast<double>(n))); }

/// Descriptive second-order fits (the constant c is not known analytically):
/// sigma ~ c gamma^2 / 2 at weak dissipation, edge shift ~ -c / gamma at strong.
inline double fit_width_constant(double sigma, double gamma) { return 2.0 * sigma / (gamma * gamma); }
inline double fit_edge_shift_constant(double edge, double gamma) { return -edge * gamma; }

/// `x,value` rows.
inline void write_curve_csv(std::ostream& os, const DensityCurve& c, std::span<const double> grid) {
    os << "x,value\n";
    for (double x : grid) os << io::fmt(x) << ',' << io::fmt(c(x)) << '\n';
}

}  // namespace lindblad::theory
