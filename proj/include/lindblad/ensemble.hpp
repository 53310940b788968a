#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lindblad/eig.hpp"
#include "lindblad/error.hpp"
#include "lindblad/lapack.hpp"
#include "lindblad/liouvillian.hpp"
#include "lindblad/reduction.hpp"
#include "lindblad/rmt.hpp"
#include "lindblad/stats.hpp"
#include "lindblad/theory.hpp"

namespace lindblad {

enum class Observable : unsigned {
    spectrum = 1u << 0,        // histograms of the eigenvalue cloud
    gap = 1u << 1,
    d23 = 1u << 2,
    projections = 1u << 3,     // raw Re/Im samples for CDF comparisons
    form_factor = 1u << 4,
    effective_model = 1u << 5  // A' spectra; the superoperator is skipped if nothing else needs it
};

struct ObservableSet {
    unsigned bits = 0;
    constexpr ObservableSet() = default;
    constexpr ObservableSet(std::initializer_list<Observable> list) {
        for (auto o : list) bits |= static_cast<unsigned>(o);
    }
    constexpr bool has(Observable o) const noexcept { return (bits & static_cast<unsigned>(o)) != 0; }
    constexpr bool needs_liouvillian() const noexcept {
        return (bits & ~static_cast<unsigned>(Observable::effective_model)) != 0;
    }
};

inline constexpr const char* to_string(Observable o) noexcept {
    switch (o) {
        case Observable::spectrum: return "spectrum";
        case Observable::gap: return "gap";
        case Observable::d23: return "d23";
        case Observable::projections: return "projections";
        case Observable::form_factor: return "form_factor";
        case Observable::effective_model: return "effective_model";
    }
    return "?";
}

inline constexpr Observable kAllObservables[] = {Observable::spectrum,    Observable::gap,         Observable::d23,
                                                 Observable::projections, Observable::form_factor, Observable::effective_model};

struct GridPoint {
    EnsembleSpec spec;  // spec.seed is ignored; keys come from the sweep's base seed
    double gamma = 0.0;
};

/// Default bins scaled to the eigenvalue cloud: Re in [-4 gamma - 1, 0],
/// |Im| below 2 sqrt2 plus margin.
struct PointBins {
    HistogramSpec re, im, small_lambda, gap, plane_re, plane_im;

    static PointBins defaults(const GridPoint& p) {
        const double re_lo = -(4.0 * p.gamma + 1.0);
        PointBins b;
        b.re = {Binning::linear, re_lo, 0.0, 200};
        b.im = {Binning::linear, -3.5, 3.5, 140};
        b.small_lambda = HistogramSpec::log_decades(1e-8, 1e2, 10);
        b.gap = HistogramSpec::log_decades(1e-8, 1e2, 10);
        b.plane_re = {Binning::linear, re_lo, 0.0, 80};
        b.plane_im = {Binning::linear, -3.5, 3.5, 70};
        return b;
    }

    /// Defaults with 20 log bins per decade for the small-|lambda| and gap tails.
    static PointBins tails(const GridPoint& p) {
        PointBins b = defaults(p);
        b.small_lambda = HistogramSpec::log_decades(1e-8, 1e2, 20);
        b.gap = HistogramSpec::log_decades(1e-8, 1e2, 20);
        return b;
    }
};

struct SweepConfig {
    std::vector<GridPoint> grid;
    int realizations = 1;
    std::uint64_t base_seed = 0;
    ObservableSet observables{Observable::spectrum, Observable::gap, Observable::d23};
    std::optional<PointBins> bins;  // per-point defaults when empty
    std::vector<double> times;      // form-factor times
    int workers = 1;
    int dense_cap = kDefaultDenseCap;
    bool steady_state_check = false;  // needs eigenvectors, roughly doubles the cost
    EffectiveVariant effective_variant = EffectiveVariant::regularized;
    int block = 64;  // realizations per scheduling block; does not affect results

    void validate() const {
        if (realizations < 1) throw Error(ErrorKind::invalid_parameter, "realizations must be >= 1");
        if (grid.empty()) throw Error(ErrorKind::invalid_parameter, "empty sweep grid");
        if (workers < 1) throw Error(ErrorKind::invalid_parameter, "workers must be >= 1");
        for (const auto& p : grid) {
            p.spec.validate();
            if (!(p.gamma >= 0.0)) {
                throw Error(ErrorKind::invalid_parameter,
                            "gamma must be >= 0: the master equation only relaxes for nonnegative dissipation");
            }
            const long dim = static_cast<long>(p.spec.n) * p.spec.n;
            if (observables.needs_liouvillian() && dim > dense_cap) {
                throw Error(ErrorKind::capacity, "grid point N=" + std::to_string(p.spec.n) + " exceeds the dense cap");
            }
            if (observables.has(Observable::effective_model) && (p.spec.k != 1 || !(p.gamma > 0.0))) {
                throw Error(ErrorKind::invalid_parameter, "effective model needs k=1 and gamma>0");
            }
        }
        for (double t : times) {
            if (!(t >= 0.0)) throw Error(ErrorKind::invalid_parameter, "form-factor times must be >= 0");
        }
        if (bins) {
            for (const auto* h : {&bins->re, &bins->im, &bins->small_lambda, &bins->gap, &bins->plane_re, &bins->plane_im}) {
                h->validate();
            }
        }
    }

    PointBins bins_for(const GridPoint& p) const { return bins ? *bins : PointBins::defaults(p); }
};

struct Quarantined {
    int grid_index = 0;
    int realization = 0;
    std::uint64_t seed = 0;
    std::string kind;
    std::string message;
};

struct FormFactorRow {
    double t = 0.0;
    double re_f = 0.0;
    double stderr_f = 0.0;
    double k_of_t = 0.0;     // numerical Hamiltonian form factor on the same draws
    double predicted = 0.0;  // form_factor_prediction with k_of_t
};

struct PointReport {
    GridPoint point;
    int realizations = 0;
    int accepted = 0;

    std::vector<double> gaps, d23s;  // per accepted realization, in realization order
    Summary gap, d23;

    Histogram re_hist, im_hist, small_lambda_hist, gap_hist;
    Histogram2D plane;
    std::uint64_t small_total = 0;  // nonzero eigenvalues with |lambda| < 1
    std::uint64_t small_real = 0;   // ... of which real-classified

    std::vector<double> re_samples, im_samples;  // nonzero eigenvalues (projections)
    std::vector<FormFactorRow> form_factor;
    std::vector<std::vector<double>> effective_spectra;
};

struct EnsembleReport {
    SweepConfig config;
    std::vector<PointReport> points;
    std::vector<Quarantined> quarantined;
};

/// Seed identifying realization r at grid point g.
inline StreamKey realization_key(std::uint64_t base_seed, int grid_index, int r) {
    return StreamKey{base_seed, static_cast<std::uint64_t>(grid_index), static_cast<std::uint32_t>(r), 0};
}

namespace detail {

struct RealizationOutput {
    bool ok = true;
    std::string kind, message;
    std::vector<cplx> eigenvalues;
    std::vector<EigClass> classes;
    std::vector<double> energies;
    std::vector<double> ff;  // Re F_r(t) per time
    double gap = std::numeric_limits<double>::quiet_NaN();
    double d23 = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> effective;
};

/// Structural invariants every accepted spectrum must satisfy.
inline void check_structure(const Spectrum& s, double gamma) {
    for (const cplx z : s.eigenvalues) {
        if (z.real() > Tolerances{}.zero * s.scale) {
            throw Error(ErrorKind::invariant_violation, "eigenvalue with positive real part " + io::fmt(z.real()));
        }
    }
    if (gamma > 0.0 && s.zero_modes.size() != 1) {
        throw Error(ErrorKind::degenerate_steady_state, std::to_string(s.zero_modes.size()) + " zero modes");
    }
}

inline RealizationOutput run_realization(const SweepConfig& cfg, int g, int r) {
    RealizationOutput out;
    const GridPoint& p = cfg.grid[static_cast<std::size_t>(g)];
    const auto& obs = cfg.observables;
    try {
        const auto model = sample_model(p.spec, p.gamma, realization_key(cfg.base_seed, g, r));
        if (obs.has(Observable::effective_model)) {
            out.effective = effective_spectrum(build_effective(model, cfg.effective_variant));
        }
        if (!obs.needs_liouvillian()) return out;

        const auto sup = build_superoperator(model, cfg.dense_cap);
        SpectrumOptions opt;
        opt.vectors = cfg.steady_state_check;
        Spectrum s = full_spectrum(sup, opt);
        check_structure(s, p.gamma);
        if (cfg.steady_state_check && p.gamma > 0.0) {
            const double ov = steady_state_check(sup, s);
            if (ov < 1.0 - 1e-8) {
                throw Error(ErrorKind::degenerate_steady_state, "steady-state overlap " + io::fmt(ov));
            }
        }
        if (p.gamma > 0.0 && (obs.has(Observable::gap) || obs.has(Observable::d23))) {
            const auto gr = gap_report(s);
            out.gap = gr.gap;
            out.d23 = gr.d23;
        }
        if (obs.has(Observable::form_factor)) {
            const double n2 = static_cast<double>(s.size());
            out.ff.reserve(cfg.times.size());
            for (double t : cfg.times) {
                cplx sum(0.0, 0.0);
                for (const cplx z : s.eigenvalues) sum += std::exp(z * t);
                if (std::abs(sum.imag()) > 1e-8 * n2) {
                    throw Error(ErrorKind::invariant_violation, "form factor has imaginary part " + io::fmt(sum.imag()));
                }
                out.ff.push_back(sum.real());
            }
            Eigen::SelfAdjointEigenSolver<CMatrix> es(model.hamiltonian.dense(), Eigen::EigenvaluesOnly);
            out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        }
        out.eigenvalues = std::move(s.eigenvalues);
        out.classes = std::move(s.classes);
    } catch (const Error& e) {
        out = RealizationOutput{};
        out.ok = false;
        out.kind = std::string(to_string(e.kind()));
        out.message = e.what();
    }
    return out;
}

/// Runs f(task) for task in [begin, end) on `workers` threads.
inline void parallel_for(int begin, int end, int workers, const std::function<void(int)>& f) {
    const int count = end - begin;
    if (count <= 0) return;
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (int i = begin; i < end; ++i) f(i);
        return;
    }
    std::atomic<int> next{begin};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < end; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// Runs every (grid point, realization) task and reduces the results in
/// realization order, so the report does not depend on worker count or
/// completion order. Failed realizations are quarantined, never fatal.
inline EnsembleReport run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    lapack::use_single_thread();

    EnsembleReport rep;
    rep.config = cfg;
    const auto& obs = cfg.observables;
    std::vector<std::vector<double>> ff_sum, ff_sq, k_sum;
    for (const auto& p : cfg.grid) {
        PointReport pr;
        pr.point = p;
        const auto b = cfg.bins_for(p);
        pr.re_hist = Histogram(b.re);
        pr.im_hist = Histogram(b.im);
        pr.small_lambda_hist = Histogram(b.small_lambda);
        pr.gap_hist = Histogram(b.gap);
        pr.plane = Histogram2D(b.plane_re, b.plane_im);
        rep.points.push_back(std::move(pr));
        ff_sum.emplace_back(cfg.times.size(), 0.0);
        ff_sq.emplace_back(cfg.times.size(), 0.0);
        k_sum.emplace_back(cfg.times.size(), 0.0);
    }

    const int per_point = cfg.realizations;
    const int total = static_cast<int>(cfg.grid.size()) * per_point;
    const int block = std::max(1, cfg.block);
    std::vector<detail::RealizationOutput> slots(static_cast<std::size_t>(std::min(block, total)));

    for (int start = 0; start < total; start += block) {
        const int stop = std::min(total, start + block);
        detail::parallel_for(start, stop, cfg.workers, [&](int task) {
            slots[static_cast<std::size_t>(task - start)] = detail::run_realization(cfg, task / per_point, task % per_point);
        });
        for (int task = start; task < stop; ++task) {
            const int g = task / per_point;
            const int r = task % per_point;
            auto& out = slots[static_cast<std::size_t>(task - start)];
            PointReport& pr = rep.points[static_cast<std::size_t>(g)];
            ++pr.realizations;
            if (!out.ok) {
                rep.quarantined.push_back({g, r, cfg.base_seed, out.kind, out.message});
                out = {};
                continue;
            }
            ++pr.accepted;
            if (obs.has(Observable::gap)) {
                pr.gaps.push_back(out.gap);
                pr.gap_hist.add(out.gap);
            }
            if (obs.has(Observable::d23)) pr.d23s.push_back(out.d23);
            for (std::size_t a = 0; a < out.eigenvalues.size(); ++a) {
                const cplx z = out.eigenvalues[a];
                const bool zero = out.classes[a] == EigClass::zero;
                if (obs.has(Observable::spectrum)) {
                    pr.re_hist.add(z.real());
                    pr.im_hist.add(z.imag());
                    pr.plane.add(z.real(), z.imag());
                    if (!zero) {
                        pr.small_lambda_hist.add(std::abs(z));
                        if (std::abs(z) < 1.0) {
                            ++pr.small_total;
                            if (out.classes[a] == EigClass::real) ++pr.small_real;
                        }
                    }
                }
                if (obs.has(Observable::projections) && !zero) {
                    pr.re_samples.push_back(z.real());
                    pr.im_samples.push_back(z.imag());
                }
            }
            if (obs.has(Observable::form_factor)) {
                for (std::size_t i = 0; i < cfg.times.size(); ++i) {
                    ff_sum[static_cast<std::size_t>(g)][i] += out.ff[i];
                    ff_sq[static_cast<std::size_t>(g)][i] += out.ff[i] * out.ff[i];
                    k_sum[static_cast<std::size_t>(g)][i] += theory::hamiltonian_form_factor(out.energies, cfg.times[i]);
                }
            }
            if (obs.has(Observable::effective_model)) pr.effective_spectra.push_back(std::move(out.effective));
            out = {};
        }
    }

    for (std::size_t g = 0; g < rep.points.size(); ++g) {
        PointReport& pr = rep.points[g];
        pr.gap = summarize(pr.gaps);
        pr.d23 = summarize(pr.d23s);
        if (obs.has(Observable::form_factor) && pr.accepted > 0) {
            const double m = pr.accepted;
            for (std::size_t i = 0; i < cfg.times.size(); ++i) {
                FormFactorRow row;
                row.t = cfg.times[i];
                row.re_f = ff_sum[g][i] / m;
                const double var = m > 1 ? std::max(0.0, (ff_sq[g][i] - m * row.re_f * row.re_f) / (m - 1)) : 0.0;
                row.stderr_f = std::sqrt(var / m);
                row.k_of_t = k_sum[g][i] / m;
                row.predicted = theory::form_factor_prediction(row.t, pr.point.spec.n, pr.point.gamma, row.k_of_t).total();
                pr.form_factor.push_back(row);
            }
        }
    }
    return rep;
}

enum class TailSamples { all_small_eigenvalues, gap };

inline constexpr const char* to_string(TailSamples t) noexcept {
    return t == TailSamples::gap ? "gap" : "all_small_eigenvalues";
}

/// Power-law slope of the log-binned density of small |lambda| (all nonzero
/// eigenvalues) or of the per-realization gap, over an explicit window or the
/// default two-decade window.
inline PowerLawFit small_lambda_tail(const PointReport& pr, TailSamples which,
                                     std::optional<std::pair<double, double>> window = std::nullopt) {
    const Histogram& h = which == TailSamples::gap ? pr.gap_hist : pr.small_lambda_hist;
    if (window) return fit_power_law(h, window->first, window->second);
    return fit_power_law(h);
}

/// Gap power law fitted from the first bin holding `min_count` events up to
/// `median_fraction` x the median gap, where the small-gap law holds.
inline PowerLawFit gap_tail_fit(const PointReport& pr, std::uint64_t min_count = 20, double median_fraction = 0.3) {
    const Histogram& h = pr.gap_hist;
    for (int b = 0; b < h.bins(); ++b) {
        if (h.counts()[static_cast<std::size_t>(b)] >= min_count) {
            return small_lambda_tail(pr, TailSamples::gap,
                                     std::make_pair(h.edges()[static_cast<std::size_t>(b)], median_fraction * pr.gap.median));
        }
    }
    throw Error(ErrorKind::insufficient_data, "no gap bin reaches " + std::to_string(min_count) + " events");
}

struct D23Row {
    double gamma = 0.0;
    int n = 0;
    Summary d23;
};

struct D23Flow {
    std::vector<D23Row> rows;
    std::vector<double> gammas;
    std::vector<double> slope;  // d(median d23)/dN per gamma (least squares over sizes)
    std::optional<double> gamma_c;
    std::string note;
};

/// Median d23 per (gamma, N) and the gamma where the finite-size flow of d23
/// changes sign from decreasing to increasing with N.
inline D23Flow d23_flow(const std::vector<double>& gammas, const std::vector<int>& sizes, int realizations,
                        std::uint64_t base_seed, int workers = 1, int beta = 1, int k = 1) {
    if (sizes.size() < 2 || gammas.size() < 3) {
        throw Error(ErrorKind::invalid_parameter, "d23 flow needs >= 2 sizes and >= 3 gammas");
    }
    SweepConfig cfg;
    for (double g : gammas) {
        for (int n : sizes) cfg.grid.push_back({EnsembleSpec{beta, n, k, base_seed}, g});
    }
    cfg.realizations = realizations;
    cfg.base_seed = base_seed;
    cfg.workers = workers;
    cfg.observables = {Observable::d23};
    const auto rep = run_sweep(cfg);

    D23Flow flow;
    flow.gammas = gammas;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t ni = 0; ni < sizes.size(); ++ni) {
            const auto& pr = rep.points[gi * sizes.size() + ni];
            flow.rows.push_back({gammas[gi], sizes[ni], pr.d23});
            const double x = sizes[ni], y = pr.d23.median;
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double m = static_cast<double>(sizes.size());
        flow.slope.push_back((m * sxy - sx * sy) / (m * sxx - sx * sx));
    }
    for (std::size_t gi = 0; gi + 1 < gammas.size(); ++gi) {
        const double a = flow.slope[gi], b = flow.slope[gi + 1];
        if (a < 0.0 && b >= 0.0) {
            flow.gamma_c = gammas[gi] + (gammas[gi + 1] - gammas[gi]) * (-a) / (b - a);
            break;
        }
    }
    if (!flow.gamma_c) flow.note = "no crossing in range";
    return flow;
}

struct EdgeCurve {
    int n = 0;
    Histogram re_hist;
    double max_slope = 0.0;  // max |d density / dx| between adjacent bins
};

struct EdgeReport {
    double gamma = 0.0;
    std::vector<EdgeCurve> curves;
    std::vector<double> crossings;  // pairwise intersections of adjacent-size curves
};

/// Normalized density of Re lambda over [lo, hi] (window near the continuum
/// edge) per N, with the steepest slope and the abscissas where curves of
/// consecutive sizes cross.
inline EdgeReport dos_edge_curves(double gamma, const std::vector<int>& sizes, int realizations, HistogramSpec window,
                                  std::uint64_t base_seed, int workers = 1, int beta = 1, int k = 1) {
    window.validate();
    SweepConfig cfg;
    for (int n : sizes) cfg.grid.push_back({EnsembleSpec{beta, n, k, base_seed}, gamma});
    cfg.realizations = realizations;
    cfg.base_seed = base_seed;
    cfg.workers = workers;
    cfg.observables = {Observable::spectrum};
    PointBins bins = PointBins::defaults(cfg.grid.front());
    bins.re = window;
    cfg.bins = bins;
    const auto rep = run_sweep(cfg);

    EdgeReport er;
    er.gamma = gamma;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        EdgeCurve c;
        c.n = sizes[i];
        c.re_hist = rep.points[i].re_hist;
        for (int b = 0; b + 1 < c.re_hist.bins(); ++b) {
            const double d = (c.re_hist.density(b + 1) - c.re_hist.density(b)) / (c.re_hist.center(b + 1) - c.re_hist.center(b));
            c.max_slope = std::max(c.max_slope, std::abs(d));
        }
        er.curves.push_back(std::move(c));
    }
    for (std::size_t i = 0; i + 1 < er.curves.size(); ++i) {
        const auto& a = er.curves[i].re_hist;
        const auto& b = er.curves[i + 1].re_hist;
        for (int j = 0; j + 1 < a.bins(); ++j) {
            const double d0 = a.density(j) - b.density(j), d1 = a.density(j + 1) - b.density(j + 1);
            if ((d0 < 0.0 && d1 >= 0.0) || (d0 > 0.0 && d1 <= 0.0)) {
                const double x0 = a.center(j), x1 = a.center(j + 1);
                er.crossings.push_back(x0 + (x1 - x0) * d0 / (d0 - d1));
            }
        }
    }
    return er;
}

inline std::vector<FormFactorRow> numerical_form_factor(const EnsembleSpec& spec, double gamma, int realizations,
                                                        const std::vector<double>& times, std::uint64_t base_seed,
                                                        int workers = 1) {
    SweepConfig cfg;
    cfg.grid = {{spec, gamma}};
    cfg.realizations = realizations;
    cfg.base_seed = base_seed;
    cfg.workers = workers;
    cfg.times = times;
    cfg.observables = {Observable::form_factor};
    return run_sweep(cfg).points.front().form_factor;
}

struct ProjectionReport {
    PointReport point;
    Histogram re_hist, im_hist;  // marginals of nonzero eigenvalues
    std::vector<double> im_theory;  // f(y) at im_hist bin centers
    std::vector<double> re_theory;  // P(x) at re_hist bin centers
    double im_distance = 0.0;       // sup-CDF distance to f(y)
    double re_distance = 0.0;       // sup-CDF distance to P(x), window x < -gamma/N^2
    double re_mean = 0.0, re_std = 0.0;
};

/// Re and Im marginals of the nonzero eigenvalues with the small-gamma f(y)
/// and large-gamma P(x) overlays on the same grids.
inline ProjectionReport projection_histograms(const EnsembleSpec& spec, double gamma, int realizations,
                                              std::uint64_t base_seed, int workers = 1,
                                              std::optional<PointBins> bins = std::nullopt) {
    SweepConfig cfg;
    cfg.grid = {{spec, gamma}};
    cfg.realizations = realizations;
    cfg.base_seed = base_seed;
    cfg.workers = workers;
    cfg.observables = {Observable::projections};
    cfg.bins = bins;
    auto rep = run_sweep(cfg);

    ProjectionReport out;
    out.point = std::move(rep.points.front());
    const auto b = cfg.bins_for(cfg.grid.front());
    out.re_hist = Histogram(b.re);
    out.im_hist = Histogram(b.im);
    const auto& re = out.point.re_samples;
    const auto& im = out.point.im_samples;
    if (re.empty()) throw Error(ErrorKind::insufficient_data, "no accepted realizations");
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i) {
        out.re_hist.add(re[i]);
        out.im_hist.add(im[i]);
        sum += re[i];
    }
    out.re_mean = sum / static_cast<double>(re.size());
    for (double x : re) sq += (x - out.re_mean) * (x - out.re_mean);
    out.re_std = std::sqrt(sq / static_cast<double>(re.size()));
    for (int i = 0; i < out.im_hist.bins(); ++i) out.im_theory.push_back(theory::imag_density_f(out.im_hist.center(i)));
    out.im_distance = sup_cdf_distance(im, theory::imag_cdf);
    if (gamma > 0.0) {
        for (int i = 0; i < out.re_hist.bins(); ++i) {
            out.re_theory.push_back(theory::large_gamma_x_density(out.re_hist.center(i), gamma));
        }
        const double cut = -gamma / (static_cast<double>(spec.n) * spec.n);
        out.re_distance = sup_cdf_distance(
            re, [gamma](double x) { return theory::large_gamma_x_cdf(x, gamma); }, -std::numeric_limits<double>::infinity(),
            cut);
    }
    return out;
}

}  // namespace lindblad
