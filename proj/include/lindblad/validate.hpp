#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lindblad/eig.hpp"
#include "lindblad/liouvillian.hpp"
#include "lindblad/rmt.hpp"

namespace lindblad {

/// Test hook: corrupts the superoperator before the checks run.
enum class Fault { none, sign_flip };

struct ValidationConfig {
    int trials = 200;
    int n_min = 2;
    int n_max = 16;
    std::vector<int> betas{1, 2};
    std::vector<double> gammas{0.0, 0.1, 1.0, 10.0, 100.0};
    std::vector<int> ks{1, 2};
    std::uint64_t seed = 0;
    Fault fault = Fault::none;

    void validate() const {
        if (trials < 1) throw Error(ErrorKind::invalid_parameter, "trials must be >= 1");
        if (n_min < 1 || n_max < n_min) throw Error(ErrorKind::invalid_dimension, "need 1 <= n_min <= n_max");
        if (betas.empty() || gammas.empty() || ks.empty()) throw Error(ErrorKind::invalid_parameter, "empty grid");
        for (double g : gammas) {
            if (!(g >= 0.0)) {
                throw Error(ErrorKind::invalid_parameter,
                            "gamma must be >= 0: the master equation only relaxes for nonnegative dissipation");
            }
        }
    }
};

struct InvariantResult {
    std::string name;
    int checked = 0;
    int failed = 0;
    double worst = 0.0;  // largest violation measure seen
    std::string first_failure;
    bool passed() const noexcept { return failed == 0; }
};

struct ValidationReport {
    std::vector<InvariantResult> invariants;
    int models = 0;
    bool passed() const {
        return std::all_of(invariants.begin(), invariants.end(), [](const auto& r) { return r.passed(); });
    }
};

/// Trial t draws (beta, N, gamma, k) by cycling through the grid with
/// co-prime strides, so every combination is visited for enough trials.
struct TrialPoint {
    int beta, n, k;
    double gamma;
};

inline TrialPoint trial_point(const ValidationConfig& c, int t) {
    const int sizes = c.n_max - c.n_min + 1;
    TrialPoint p;
    p.beta = c.betas[static_cast<std::size_t>(t) % c.betas.size()];
    p.n = c.n_min + (t * 7) % sizes;
    p.gamma = c.gammas[static_cast<std::size_t>(t / static_cast<int>(c.betas.size())) % c.gammas.size()];
    p.k = c.ks[static_cast<std::size_t>(t / 3) % c.ks.size()];
    return p;
}

inline ValidationReport run_structural_suite(const ValidationConfig& cfg) {
    cfg.validate();
    ValidationReport rep;
    auto named = [](const char* name) {
        InvariantResult r;
        r.name = name;
        return r;
    };
    InvariantResult trace = named("trace_preservation"), herm = named("hermiticity_preservation"),
                    re = named("re_nonpositive"), conj = named("conjugate_closed"), zero = named("unique_zero_mode"),
                    ss = named("steady_state_overlap"), par = named("real_count_parity");

    auto fail = [](InvariantResult& r, double measure, const std::string& where) {
        ++r.failed;
        r.worst = std::max(r.worst, measure);
        if (r.first_failure.empty()) r.first_failure = where;
    };

    for (int t = 0; t < cfg.trials; ++t) {
        const auto tp = trial_point(cfg, t);
        const EnsembleSpec spec{tp.beta, tp.n, tp.k, cfg.seed};
        const auto model = sample_model(spec, tp.gamma, StreamKey{cfg.seed, 0, static_cast<std::uint32_t>(t), 0});
        Superoperator sup = build_superoperator(model);
        if (cfg.fault == Fault::sign_flip) {
            // Negate the first population row.
            CMatrix d = sup.dense();
            const int n = sup.n();
            d.row(0) = -d.row(0);
            sup = Superoperator(std::move(d), n, sup.gamma(), sup.spec(), sup.real_model());
        }
        ++rep.models;
        const std::string where = "trial " + std::to_string(t) + " (beta=" + std::to_string(tp.beta) +
                                  ", N=" + std::to_string(tp.n) + ", k=" + std::to_string(tp.k) +
                                  ", gamma=" + io::fmt(tp.gamma) + ")";
        const int n = sup.n();
        const double scale = std::max(1.0, sup.max_abs());

        // Column sums over the diagonal rows: d tr(rho)/dt = 0 for every rho.
        double tr_err = 0.0;
        for (int c = 0; c < sup.dim(); ++c) {
            cplx s(0.0, 0.0);
            for (int i = 0; i < n; ++i) s += sup.dense()(composite(i, i, n), c);
            tr_err = std::max(tr_err, std::abs(s));
        }
        ++trace.checked;
        if (tr_err > 1e-12 * scale) fail(trace, tr_err, where);

        // S_{ij,kl} = conj(S_{ji,lk})
        double h_err = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) h_err = std::max(h_err, std::abs(sup(i, j, k, l) - std::conj(sup(j, i, l, k))));
        ++herm.checked;
        if (h_err > 1e-12 * scale) fail(herm, h_err, where);

        Spectrum s;
        try {
            s = full_spectrum(sup);
        } catch (const Error& e) {
            ++conj.checked;
            fail(conj, 1.0, where + ": " + e.what());
            continue;
        }
        double max_re = -std::numeric_limits<double>::infinity();
        for (const cplx z : s.eigenvalues) max_re = std::max(max_re, z.real());
        ++re.checked;
        if (max_re > 1e-9 * s.scale) fail(re, max_re, where);

        // Independent multiset check: every eigenvalue has its conjugate.
        double conj_err = 0.0;
        for (const cplx z : s.eigenvalues) {
            double best = std::numeric_limits<double>::infinity();
            for (const cplx w : s.eigenvalues) best = std::min(best, std::abs(w - std::conj(z)));
            conj_err = std::max(conj_err, best);
        }
        ++conj.checked;
        if (conj_err > 1e-7 * s.scale) fail(conj, conj_err, where);

        if (tp.gamma > 0.0) {
            ++zero.checked;
            if (s.zero_modes.size() != 1) {
                fail(zero, static_cast<double>(s.zero_modes.size()), where);
            } else {
                ++ss.checked;
                const double ov = steady_state_check(sup, s);
                if (ov < 1.0 - 1e-8) fail(ss, 1.0 - ov, where);
            }
        }
        if (tp.beta == 1 && tp.k == 1) {
            const int reals = static_cast<int>(s.real_indices.size());
            ++par.checked;
            if (reals < n || (reals - n) % 2 != 0) fail(par, static_cast<double>(reals), where);
        }
    }
    rep.invariants = {trace, herm, re, conj, zero, ss, par};
    return rep;
}

}  // namespace lindblad
