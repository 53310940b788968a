#pragma once

#include <charconv>
#include <complex>
#include <fstream>
#include <ostream>
#include <string>
#include <system_error>

#include <Eigen/Dense>

#include "lindblad/error.hpp"

namespace lindblad::io {

/// Shortest decimal string that parses back to the same double.
inline std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw Error(ErrorKind::invalid_parameter, "not a number: '" + s + "'");
    }
    return v;
}

/// `i,j,re,im` rows, row-major, header included.
template <typename Derived>
void write_matrix_csv(std::ostream& os, const Eigen::MatrixBase<Derived>& m) {
    os << "i,j,re,im\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const std::complex<double> v = m(i, j);
            os << i << ',' << j << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
        }
    }
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::invalid_parameter, "cannot open '" + path + "' for writing");
    return f;
}

}  // namespace lindblad::io
