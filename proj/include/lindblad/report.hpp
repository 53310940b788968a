#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lindblad/ensemble.hpp"
#include "lindblad/io.hpp"
#include "lindblad/reduction.hpp"
#include "lindblad/stats.hpp"

namespace lindblad::report {

using json = nlohmann::ordered_json;

inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Summary& s) {
    return {{"count", s.count}, {"mean", num(s.mean)},  {"stderr", num(s.stderr_mean)},
            {"median", num(s.median)}, {"q25", num(s.q25)}, {"q75", num(s.q75)}};
}

inline json to_json(const PowerLawFit& f) {
    return {{"slope", num(f.slope)},       {"stderr", num(f.slope_stderr)},   {"intercept", num(f.intercept)},
            {"reduced_chi2", num(f.reduced_chi2)}, {"window", {f.window_lo, f.window_hi}}, {"bins_used", f.bins_used}};
}

inline json to_json(const HistogramSpec& h) {
    return {{"binning", h.binning == Binning::log ? "log" : "linear"}, {"lo", h.lo}, {"hi", h.hi}, {"bins", h.bins}};
}

inline json to_json(const GridPoint& p) {
    return {{"beta", p.spec.beta}, {"n", p.spec.n}, {"k", p.spec.k}, {"gamma", p.gamma}};
}

inline json to_json(const SweepConfig& c) {
    json obs = json::array();
    for (auto o : kAllObservables) {
        if (c.observables.has(o)) obs.push_back(to_string(o));
    }
    json grid = json::array();
    for (const auto& p : c.grid) grid.push_back(to_json(p));
    json j = {{"grid", grid},
              {"realizations", c.realizations},
              {"base_seed", c.base_seed},
              {"observables", obs},
              {"times", c.times},
              {"dense_cap", c.dense_cap},
              {"steady_state_check", c.steady_state_check},
              {"effective_variant", c.effective_variant == EffectiveVariant::bare ? "bare" : "regularized"}};
    if (c.bins) {
        j["bins"] = {{"re", to_json(c.bins->re)},     {"im", to_json(c.bins->im)},
                     {"small_lambda", to_json(c.bins->small_lambda)}, {"gap", to_json(c.bins->gap)},
                     {"plane_re", to_json(c.bins->plane_re)}, {"plane_im", to_json(c.bins->plane_im)}};
    }
    return j;
}

inline json to_json(const Quarantined& q) {
    return {{"grid_index", q.grid_index}, {"realization", q.realization}, {"base_seed", q.seed},
            {"kind", q.kind}, {"message", q.message}};
}

/// Summary of one grid point; raw samples and histograms go to CSV.
inline json to_json(const PointReport& p) {
    json j = {{"point", to_json(p.point)}, {"realizations", p.realizations}, {"accepted", p.accepted}};
    if (!p.gaps.empty()) j["gap"] = to_json(p.gap);
    if (!p.d23s.empty()) j["d23"] = to_json(p.d23);
    if (p.re_hist.events() > 0) {
        j["eigenvalue_events"] = p.re_hist.events();
        j["small_lambda"] = {{"total", p.small_total}, {"real_classified", p.small_real}};
    }
    return j;
}

inline json to_json(const EnsembleReport& r) {
    json pts = json::array();
    for (const auto& p : r.points) pts.push_back(to_json(p));
    json q = json::array();
    for (const auto& x : r.quarantined) q.push_back(to_json(x));
    return {{"config", to_json(r.config)}, {"points", pts}, {"quarantined", q}};
}

inline json to_json(const D23Flow& f) {
    json rows = json::array();
    for (const auto& r : f.rows) rows.push_back({{"gamma", r.gamma}, {"n", r.n}, {"d23", to_json(r.d23)}});
    json j = {{"rows", rows}, {"gammas", f.gammas}, {"slope_vs_n", f.slope}};
    j["gamma_c"] = f.gamma_c ? json(*f.gamma_c) : json(nullptr);
    if (!f.note.empty()) j["note"] = f.note;
    return j;
}

inline json to_json(const EffectivePeak& p) {
    return {{"mode", p.mode},  {"center", p.center},         {"predicted", p.predicted}, {"rel_offset", p.rel_offset},
            {"iqr", p.iqr},    {"separation", num(p.separation)}, {"resolved", p.resolved}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    auto os = io::open_out(path.string());
    os << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

template <typename Writer>
void write_csv(const std::filesystem::path& path, Writer&& w) {
    auto os = io::open_out(path.string());
    w(os);
}

/// `t,re_F,stderr`
inline void write_form_factor_csv(std::ostream& os, const std::vector<FormFactorRow>& rows) {
    os << "t,re_F,stderr\n";
    for (const auto& r : rows) os << io::fmt(r.t) << ',' << io::fmt(r.re_f) << ',' << io::fmt(r.stderr_f) << '\n';
}

/// `t,K,predicted`
inline void write_form_factor_theory_csv(std::ostream& os, const std::vector<FormFactorRow>& rows) {
    os << "t,K,predicted\n";
    for (const auto& r : rows) os << io::fmt(r.t) << ',' << io::fmt(r.k_of_t) << ',' << io::fmt(r.predicted) << '\n';
}

/// `gamma,n,median,q25,q75,count`
inline void write_d23_csv(std::ostream& os, const D23Flow& f) {
    os << "gamma,n,median,q25,q75,count\n";
    for (const auto& r : f.rows) {
        os << io::fmt(r.gamma) << ',' << r.n << ',' << io::fmt(r.d23.median) << ',' << io::fmt(r.d23.q25) << ','
           << io::fmt(r.d23.q75) << ',' << r.d23.count << '\n';
    }
}

/// `mode,center,predicted,rel_offset,iqr,separation,resolved`
inline void write_peaks_csv(std::ostream& os, const std::vector<EffectivePeak>& peaks) {
    os << "mode,center,predicted,rel_offset,iqr,separation,resolved\n";
    for (const auto& p : peaks) {
        os << p.mode << ',' << io::fmt(p.center) << ',' << io::fmt(p.predicted) << ',' << io::fmt(p.rel_offset) << ','
           << io::fmt(p.iqr) << ',' << io::fmt(p.separation) << ',' << (p.resolved ? 1 : 0) << '\n';
    }
}

/// `x,density,theory` on the histogram bin centers.
inline void write_overlay_csv(std::ostream& os, const Histogram& h, const std::vector<double>& theory) {
    os << "x,density,theory\n";
    for (int b = 0; b < h.bins(); ++b) {
        os << io::fmt(h.center(b)) << ',' << io::fmt(h.density(b)) << ','
           << io::fmt(b < static_cast<int>(theory.size()) ? theory[static_cast<std::size_t>(b)] : 0.0) << '\n';
    }
}

}  // namespace lindblad::report
