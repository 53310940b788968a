#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "lindblad/rng.hpp"
#include "lindblad/stats.hpp"

using namespace lindblad;

TEST(Histogram, MassAndSchema) {
    Histogram h({Binning::linear, 0.0, 1.0, 4});
    for (double x : {-1.0, 0.0, 0.1, 0.3, 0.99, 1.0, 2.0}) h.add(x);
    EXPECT_EQ(h.events(), 7u);
    EXPECT_EQ(h.underflow(), 1u);
    EXPECT_EQ(h.overflow(), 2u);
    EXPECT_EQ(h.counts(), (std::vector<std::uint64_t>{2, 1, 0, 1}));
    EXPECT_NEAR(h.density(0), 2.0 / (7 * 0.25), 1e-15);
    std::ostringstream os;
    h.write_csv(os);
    EXPECT_EQ(os.str().substr(0, 30), "bin_lo,bin_hi,count,density\n0,");
}

TEST(Histogram, LogEdges) {
    const auto s = HistogramSpec::log_decades(1e-3, 1e1, 5);
    EXPECT_EQ(s.bins, 20);
    const auto e = s.edges();
    EXPECT_EQ(e.front(), 1e-3);
    EXPECT_EQ(e.back(), 1e1);
    EXPECT_NEAR(e[5], 1e-2, 1e-15);
    EXPECT_THROW((HistogramSpec{Binning::log, 0.0, 1.0, 3}.edges()), Error);
    EXPECT_THROW((HistogramSpec{Binning::linear, 1.0, 1.0, 3}.edges()), Error);
}

TEST(Histogram, MergeIsOrderFree) {
    Histogram a({Binning::linear, 0, 1, 10}), b({Binning::linear, 0, 1, 10});
    a.add(0.15);
    b.add(0.55);
    Histogram c = a, d = b;
    c.merge(b);
    d.merge(a);
    EXPECT_EQ(c.counts(), d.counts());
    EXPECT_THROW(a.merge(Histogram({Binning::linear, 0, 2, 10})), Error);
}

class PowerLawRecovery : public ::testing::TestWithParam<double> {};

// Samples with density ~ x^e on (0, 1] by inversion, fitted over four decades.
TEST_P(PowerLawRecovery, SyntheticExponent) {
    const double e = GetParam();
    const CounterRng rng(StreamKey{100, 0, 0, 0});
    Histogram h(HistogramSpec::log_decades(1e-6, 1.0, 10));
    for (std::uint64_t i = 0; i < 1000000; ++i) h.add(std::pow(rng.uniform(i), 1.0 / (e + 1.0)));
    const auto lo = e == 0.0 ? 1e-4 : (e == 1.0 ? 1e-2 : 3e-2);
    const auto f = fit_power_law(h, lo, 1.0);
    EXPECT_NEAR(f.slope, e, 0.05);
    EXPECT_LT(f.slope_stderr, 0.05);
    EXPECT_GE(f.bins_used, 10);
}

INSTANTIATE_TEST_SUITE_P(Exponents, PowerLawRecovery, ::testing::Values(0.0, 1.0, 2.0));

TEST(PowerLaw, DefaultWindowAndErrors) {
    const CounterRng rng(StreamKey{101, 0, 0, 0});
    Histogram h(HistogramSpec::log_decades(1e-8, 1.0, 10));
    for (std::uint64_t i = 0; i < 200000; ++i) h.add(rng.uniform(i));
    const auto f = fit_power_law(h);
    EXPECT_NEAR(f.window_hi / f.window_lo, 100.0, 1e-9);
    EXPECT_NEAR(f.slope, 0.0, 0.1);
    Histogram sparse(HistogramSpec::log_decades(1e-3, 1.0, 10));
    for (int i = 0; i < 100; ++i) sparse.add(0.5);
    EXPECT_THROW(fit_power_law(sparse, 1e-3, 1.0), Error);
}

TEST(Summary, Quantiles) {
    const std::vector<double> v{4, 1, 3, 2, std::nan("")};
    const auto s = summarize(v);
    EXPECT_EQ(s.count, 4u);
    EXPECT_EQ(s.median, 2.5);
    EXPECT_EQ(s.q25, 1.75);
    EXPECT_EQ(s.mean, 2.5);
}

TEST(SupCdf, UniformSamples) {
    std::vector<double> u;
    for (int i = 0; i < 1000; ++i) u.push_back((i + 0.5) / 1000.0);
    const auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    EXPECT_NEAR(sup_cdf_distance(u, cdf), 0.0005, 1e-12);
    // conditioning on a window
    EXPECT_NEAR(sup_cdf_distance(u, cdf, 0.0, 0.5), 0.001, 1e-12);
    EXPECT_GT(sup_cdf_distance(u, [](double x) { return std::clamp(x * x, 0.0, 1.0); }), 0.2);
}

TEST(Extrapolation, InverseN) {
    const std::vector<int> n{8, 16, 32};
    std::vector<double> y;
    for (int k : n) y.push_back(0.7 + 3.0 / k);
    EXPECT_NEAR(extrapolate_inverse_n(n, y), 0.7, 1e-12);
}
