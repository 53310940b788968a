#pragma once

// Independent eigenvalue oracle for small matrices: characteristic polynomial
// via Faddeev-LeVerrier, roots via Durand-Kerner. Both run in binary128 so
// clustered roots (the exact zero mode next to a slow mode) stay accurate to
// well below double rounding of the input.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using quad = __float128;

struct qcplx {
    quad re = 0, im = 0;

    qcplx() = default;
    qcplx(quad r, quad i = 0) : re(r), im(i) {}
    explicit qcplx(cplx z) : re(z.real()), im(z.imag()) {}

    cplx to_double() const { return {static_cast<double>(re), static_cast<double>(im)}; }
    double abs() const { return std::hypot(static_cast<double>(re), static_cast<double>(im)); }

    friend qcplx operator+(qcplx a, qcplx b) { return {a.re + b.re, a.im + b.im}; }
    friend qcplx operator-(qcplx a, qcplx b) { return {a.re - b.re, a.im - b.im}; }
    friend qcplx operator*(qcplx a, qcplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
    friend qcplx operator/(qcplx a, qcplx b) {
        const quad d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
};

using qmatrix = std::vector<std::vector<qcplx>>;

/// Coefficients c[0..n] of det(zI - A) = sum c[k] z^(n-k), c[0] = 1.
inline std::vector<qcplx> char_poly(const Eigen::MatrixXcd& a_in) {
    const auto n = static_cast<std::size_t>(a_in.rows());
    qmatrix a(n, std::vector<qcplx>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = qcplx(a_in(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));

    auto mul = [&](const qmatrix& x, const qmatrix& y) {
        qmatrix out(n, std::vector<qcplx>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t j = 0; j < n; ++j) out[i][j] = out[i][j] + x[i][k] * y[k][j];
        return out;
    };

    std::vector<qcplx> c(n + 1);
    c[0] = qcplx(1);
    qmatrix m(n, std::vector<qcplx>(n));
    for (std::size_t k = 1; k <= n; ++k) {
        m = mul(a, m);
        for (std::size_t i = 0; i < n; ++i) m[i][i] = m[i][i] + c[k - 1];
        const qmatrix am = mul(a, m);
        qcplx tr;
        for (std::size_t i = 0; i < n; ++i) tr = tr + am[i][i];
        c[k] = qcplx(0) - tr / qcplx(static_cast<quad>(k));
    }
    return c;
}

inline std::vector<qcplx> char_poly(const Eigen::MatrixXd& a) { return char_poly(Eigen::MatrixXcd(a.cast<cplx>())); }

inline qcplx horner(const std::vector<qcplx>& c, qcplx z) {
    qcplx v = c[0];
    for (std::size_t i = 1; i < c.size(); ++i) v = v * z + c[i];
    return v;
}

inline std::vector<cplx> roots(const std::vector<qcplx>& c) {
    const std::size_t n = c.size() - 1;
    double radius = 0.0;
    for (std::size_t i = 1; i <= n; ++i) radius = std::max(radius, std::pow(c[i].abs(), 1.0 / static_cast<double>(i)));
    radius = 2.0 * radius + 1.0;
    std::vector<qcplx> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = qcplx(radius * std::polar(1.0, 0.4 + 2.0 * 3.141592653589793 * static_cast<double>(i) / static_cast<double>(n)));
    int settled = 0;
    for (int it = 0; it < 20000 && settled < 3; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            qcplx den(1);
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) den = den * (z[i] - z[j]);
            }
            const qcplx step = horner(c, z[i]) / den;
            z[i] = z[i] - step;
            change = std::max(change, step.abs());
        }
        // a few extra sweeps once converged in double polish the quad digits
        settled = change < 1e-17 * radius ? settled + 1 : 0;
    }
    std::vector<cplx> out;
    for (const auto& q : z) out.push_back(q.to_double());
    return out;
}

/// Largest distance between the two multisets after greedy matching.
inline double match_distance(std::vector<cplx> a, std::vector<cplx> b) {
    double worst = 0.0;
    for (const cplx x : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

}  // namespace oracle
