#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "lindblad/eig.hpp"
#include "lindblad/liouvillian.hpp"
#include "oracle.hpp"

using namespace lindblad;

namespace {

LindbladModel draw(int beta, int n, int k, double gamma, std::uint32_t r) {
    return sample_model(EnsembleSpec{beta, n, k, 77}, gamma, StreamKey{77, 0, r, 0});
}

}  // namespace

TEST(Oracle, RecoversKnownRoots) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3, 3);
    a.diagonal() << cplx(1, 1), cplx(-2, 0), cplx(0.5, -3);
    a(0, 2) = 4.0;
    const auto r = oracle::roots(oracle::char_poly(a));
    EXPECT_LT(oracle::match_distance(r, {cplx(1, 1), cplx(-2, 0), cplx(0.5, -3)}), 1e-12);
}

TEST(FullSpectrum, TwoLevelMatchesCharacteristicPolynomial) {
    for (std::uint32_t r = 0; r < 200; ++r) {
        const int beta = 1 + static_cast<int>(r % 2);
        const double gamma = std::pow(10.0, -2.0 + 4.0 * (r % 9) / 8.0);
        const auto sup = build_superoperator(draw(beta, 2, 1 + static_cast<int>(r % 3), gamma, r));
        const auto s = full_spectrum(sup);
        const auto ref = oracle::roots(oracle::char_poly(sup.dense()));
        ASSERT_LT(oracle::match_distance(s.eigenvalues, ref), 1e-8) << "draw " << r;
    }
}

TEST(FullSpectrum, HamiltonianOnlyGivesEnergyDifferences) {
    const auto m = draw(1, 5, 1, 0.0, 4);
    const auto s = full_spectrum(build_superoperator(m));
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m.hamiltonian.dense().real());
    std::vector<cplx> expect;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) expect.emplace_back(0.0, -(es.eigenvalues()(i) - es.eigenvalues()(j)));
    EXPECT_LT(oracle::match_distance(s.eigenvalues, expect), 1e-12);
    EXPECT_EQ(s.zero_modes.size(), 5u);
}

TEST(FullSpectrum, ResidualsAndEigenvectors) {
    const auto sup = build_superoperator(draw(2, 4, 2, 1.5, 1));
    const auto s = full_spectrum(sup);
    EXPECT_LT(s.max_residual(), 1e-12);
    for (int a = 0; a < s.size(); ++a) {
        const CVector v = s.eigenvector(a);
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
        EXPECT_LT((sup.dense() * v - s.eigenvalues[static_cast<std::size_t>(a)] * v).norm(), 1e-11 * s.scale);
    }
}

TEST(Classify, ConjugatePairsAndRealAxis) {
    const auto s = full_spectrum(build_superoperator(draw(1, 6, 1, 3.0, 2)));
    int lo = 0, hi = 0;
    for (int a = 0; a < s.size(); ++a) {
        const int p = s.pair_map[static_cast<std::size_t>(a)];
        const auto c = s.classes[static_cast<std::size_t>(a)];
        if (c == EigClass::pair_lo || c == EigClass::pair_hi) {
            ASSERT_GE(p, 0);
            EXPECT_EQ(s.eigenvalues[static_cast<std::size_t>(p)], std::conj(s.eigenvalues[static_cast<std::size_t>(a)]));
            EXPECT_EQ(s.pair_map[static_cast<std::size_t>(p)], a);
            (c == EigClass::pair_lo ? lo : hi)++;
        } else {
            EXPECT_EQ(p, -1);
            EXPECT_EQ(s.eigenvalues[static_cast<std::size_t>(a)].imag(), 0.0);
        }
    }
    EXPECT_EQ(lo, hi);
    EXPECT_EQ(s.zero_modes.size(), 1u);
    EXPECT_GE(static_cast<int>(s.real_indices.size()), 6);
    EXPECT_EQ((s.real_indices.size() - 6) % 2, 0u);
}

TEST(SteadyState, MaximallyMixed) {
    for (int beta : {1, 2}) {
        const auto sup = build_superoperator(draw(beta, 7, 2, 0.4, 5));
        const auto s = full_spectrum(sup);
        EXPECT_GE(steady_state_check(sup, s), 1.0 - 1e-10);
    }
}

TEST(SteadyState, DegenerateAtZeroGamma) {
    const auto sup = build_superoperator(draw(1, 3, 1, 0.0, 5));
    const auto s = full_spectrum(sup);
    try {
        steady_state_check(sup, s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate_steady_state);
    }
}

TEST(GapReport, DistinctModesAndD23) {
    Spectrum s;
    s.eigenvalues = {0.0, cplx(-1, 2), cplx(-1, -2), -0.5, -3.0};
    s.classes = {EigClass::zero, EigClass::pair_hi, EigClass::pair_lo, EigClass::real, EigClass::real};
    s.zero_modes = {0};
    const auto g = gap_report(s);
    EXPECT_EQ(g.gap, 0.5);
    EXPECT_EQ(g.d23, 0.5);  // -0.5 - (-1): pairs counted once
    const auto modes = distinct_decay_modes(s);
    ASSERT_EQ(modes.size(), 3u);
    EXPECT_EQ(modes[1], cplx(-1, 2));
}

TEST(SpectrumCsv, Schema) {
    const auto s = full_spectrum(build_superoperator(draw(1, 2, 1, 1.0, 0)));
    std::ostringstream os;
    write_spectrum_csv(os, s);
    const std::string out = os.str();
    EXPECT_EQ(out.rfind("index,re,im,residual,class\n", 0), 0u);
    EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 5);
}
