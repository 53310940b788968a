#include <sstream>

#include <gtest/gtest.h>

#include "lindblad/ensemble.hpp"
#include "lindblad/report.hpp"

using namespace lindblad;

namespace {

std::string serialize(const EnsembleReport& r) {
    std::ostringstream os;
    os << report::to_json(r).dump();
    for (const auto& p : r.points) {
        p.re_hist.write_csv(os);
        p.small_lambda_hist.write_csv(os);
        p.plane.write_csv(os);
        report::write_form_factor_csv(os, p.form_factor);
        for (double x : p.re_samples) os << io::fmt(x) << ',';
        for (const auto& s : p.effective_spectra)
            for (double x : s) os << io::fmt(x) << ',';
    }
    return os.str();
}

SweepConfig mixed_config(int workers) {
    SweepConfig c;
    c.grid = {{EnsembleSpec{1, 4, 1, 0}, 1.0}, {EnsembleSpec{2, 3, 1, 0}, 0.1}, {EnsembleSpec{1, 5, 1, 0}, 20.0}};
    c.realizations = 23;
    c.base_seed = 99;
    c.observables = {Observable::spectrum, Observable::gap, Observable::d23, Observable::projections,
                     Observable::form_factor, Observable::effective_model};
    c.times = {0.0, 0.5, 2.0};
    c.workers = workers;
    c.block = 7;
    return c;
}

}  // namespace

TEST(Sweep, DeterministicAcrossWorkers) {
    const auto one = serialize(run_sweep(mixed_config(1)));
    EXPECT_EQ(one, serialize(run_sweep(mixed_config(8))));
    EXPECT_EQ(one, serialize(run_sweep(mixed_config(3))));
}

TEST(Sweep, SingleRealizationMatchesDirectPipeline) {
    SweepConfig c;
    c.grid = {{EnsembleSpec{1, 5, 1, 0}, 2.0}};
    c.realizations = 1;
    c.base_seed = 4;
    c.observables = {Observable::gap, Observable::projections};
    const auto rep = run_sweep(c);
    const auto model = sample_model(EnsembleSpec{1, 5, 1, 0}, 2.0, realization_key(4, 0, 0));
    const auto s = full_spectrum(build_superoperator(model));
    EXPECT_EQ(rep.points[0].gaps.at(0), gap_report(s).gap);
    EXPECT_EQ(rep.points[0].re_samples.size(), 24u);
}

TEST(Sweep, HistogramTotals) {
    const auto rep = run_sweep(mixed_config(2));
    for (const auto& p : rep.points) {
        const auto n2 = static_cast<std::uint64_t>(p.point.spec.n) * p.point.spec.n;
        EXPECT_EQ(p.re_hist.events(), n2 * static_cast<std::uint64_t>(p.accepted));
        EXPECT_EQ(p.realizations, 23);
    }
    EXPECT_TRUE(rep.quarantined.empty());
}

TEST(Sweep, FormFactorAtZero) {
    const auto rows = numerical_form_factor(EnsembleSpec{2, 4, 1, 0}, 0.5, 10, {0.0, 1e3}, 3);
    EXPECT_EQ(rows[0].re_f, 16.0);
    EXPECT_EQ(rows[0].stderr_f, 0.0);
    EXPECT_NEAR(rows[1].re_f, 1.0, 1e-6);
    EXPECT_NEAR(rows[0].predicted, 16.0, 1e-12);
}

TEST(Sweep, ConfigErrors) {
    SweepConfig c;
    EXPECT_THROW(run_sweep(c), Error);
    c.grid = {{EnsembleSpec{1, 65, 1, 0}, 1.0}};
    try {
        run_sweep(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::capacity);
    }
    c.grid = {{EnsembleSpec{1, 3, 1, 0}, -1.0}};
    EXPECT_THROW(run_sweep(c), Error);
}

TEST(Sweep, QuarantineIsNotFatal) {
    // gamma = 0 with the gap observable: generic draws still pass, and a
    // failing realization would only be logged.
    SweepConfig c;
    c.grid = {{EnsembleSpec{1, 3, 1, 0}, 0.0}};
    c.realizations = 5;
    c.observables = {Observable::spectrum, Observable::gap};
    const auto rep = run_sweep(c);
    EXPECT_EQ(rep.points[0].accepted + static_cast<int>(rep.quarantined.size()), 5);
}

TEST(D23Flow, CrossingInterpolation) {
    EXPECT_THROW(d23_flow({1.0, 2.0}, {4, 6}, 2, 0), Error);
    const auto f = d23_flow({0.5, 5.0, 50.0}, {4, 6}, 6, 1);
    EXPECT_EQ(f.rows.size(), 6u);
    EXPECT_EQ(f.slope.size(), 3u);
    if (!f.gamma_c) {
        EXPECT_EQ(f.note, "no crossing in range");
    }
}

TEST(Projections, OverlaysOnSameGrid) {
    const auto p = projection_histograms(EnsembleSpec{1, 6, 1, 0}, 0.01, 5, 2);
    EXPECT_EQ(p.im_theory.size(), static_cast<std::size_t>(p.im_hist.bins()));
    EXPECT_EQ(p.re_theory.size(), static_cast<std::size_t>(p.re_hist.bins()));
    EXPECT_EQ(p.re_hist.events(), 5u * 35u);
    EXPECT_GT(p.im_distance, 0.0);
}
