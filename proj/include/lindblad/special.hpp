#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace lindblad::special {

struct EllipticPair {
    double k;  // first kind
    double e;  // second kind
};

/// Complete elliptic integrals K(m), E(m) from the complementary parameter
/// mc = 1 - m (m = modulus squared) by the arithmetic-geometric mean.
/// Passing mc directly keeps full accuracy near m = 1.
inline EllipticPair complete_elliptic_mc(double mc) {
    constexpr double pi = std::numbers::pi;
    if (mc <= 0.0) return {std::numeric_limits<double>::infinity(), 1.0};
    const double m = 1.0 - mc;
    double a = 1.0;
    double g = std::sqrt(mc);
    double c2 = m;       // c_n^2
    double weight = 0.5; // 2^(n-1)
    double sum = weight * c2;
    for (int it = 0; it < 64; ++it) {
        const double c = 0.5 * (a - g);
        const double an = 0.5 * (a + g);
        g = std::sqrt(a * g);
        a = an;
        weight *= 2.0;
        c2 = c * c;
        sum += weight * c2;
        if (std::abs(c) <= std::numeric_limits<double>::epsilon() * a) break;
    }
    const double k = pi / (2.0 * a);
    return {k, k * (1.0 - sum)};
}

inline double ellint_k(double m) { return complete_elliptic_mc(1.0 - m).k; }
inline double ellint_e(double m) { return complete_elliptic_mc(1.0 - m).e; }

}  // namespace lindblad::special
