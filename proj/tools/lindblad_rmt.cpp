// lindblad-rmt: spectra of random Lindbladians from the command line.
//
//   lindblad-rmt spectrum --n 8 --gamma 1 --seed 7 --out run/
//   lindblad-rmt reproduce fig4 --scale desk --out fig4/
//   lindblad-rmt validate --trials 200
//
// Exit codes: 0 ok, 2 usage or capacity, 3 invariant violation,
// 4 numerical non-convergence.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "lindblad/eig.hpp"
#include "lindblad/ensemble.hpp"
#include "lindblad/lapack.hpp"
#include "lindblad/liouvillian.hpp"
#include "lindblad/reduction.hpp"
#include "lindblad/report.hpp"
#include "lindblad/rmt.hpp"
#include "lindblad/validate.hpp"

#ifndef LINDBLAD_VERSION
#define LINDBLAD_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace lindblad;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitNonConvergence = 4;

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::non_convergence: return kExitNonConvergence;
        case ErrorKind::invariant_violation:
        case ErrorKind::degenerate_steady_state:
        case ErrorKind::classification_failure: return kExitInvariant;
        default: return kExitUsage;
    }
}

std::string sha256_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::vector<char> buf(1 << 16);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    while (f) {
        f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (f.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(f.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    char b[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(b, sizeof b, "%02x", md[i]);
        hex += b;
    }
    return hex;
}

using Clock = std::chrono::steady_clock;

/// Collects outputs and stage timings; written last as manifest.json.
class Manifest {
public:
    Manifest(std::string command, fs::path dir) : command_(std::move(command)), dir_(std::move(dir)), start_(Clock::now()) {}

    fs::path path(const std::string& name) {
        files_.push_back(name);
        return dir_ / name;
    }

    void stage(const std::string& name, Clock::time_point since) {
        stages_[name] = std::chrono::duration<double>(Clock::now() - since).count();
    }

    void write(const json& config, std::uint64_t seed) {
        json outs = json::array();
        for (const auto& f : files_) {
            const auto p = dir_ / f;
            outs.push_back({{"path", f}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
        }
        json timings = {{"total_s", std::chrono::duration<double>(Clock::now() - start_).count()}};
        for (const auto& [k, v] : stages_) timings[k] = v;
        const json m = {{"command", command_}, {"version", LINDBLAD_VERSION}, {"config", config},
                        {"seed", seed},        {"timings", timings},          {"outputs", outs}};
        report::write_json(dir_ / "manifest.json", m);
    }

private:
    std::string command_;
    fs::path dir_;
    Clock::time_point start_;
    std::vector<std::string> files_;
    std::map<std::string, double> stages_;
};

int default_workers() {
    if (const char* env = std::getenv("LINDBLAD_RMT_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (...) {
        }
        throw Error(ErrorKind::invalid_parameter, std::string("LINDBLAD_RMT_WORKERS must be a positive integer, got '") +
                                                      env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::invalid_parameter, "cannot read config '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_parameter, "config '" + path + "': " + e.what());
    }
}

/// Flag value if given, else config-file value, else the current default.
template <typename T>
void merge(T& target, const CLI::Option* flag, const json& cfg, const char* key, const T& flag_value) {
    if (flag && flag->count() > 0) {
        target = flag_value;
    } else if (cfg.contains(key)) {
        target = cfg.at(key).get<T>();
    }
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
    int n = 4;
    double gamma = 1.0;
    std::string ensemble = "goe";
    int k = 1;
    std::uint64_t seed = 0;
    std::string format = "csv";
    bool vectors = true;

    json to_json() const {
        return {{"n", n}, {"gamma", gamma}, {"ensemble", ensemble}, {"k", k}, {"seed", seed}, {"format", format},
                {"vectors", vectors}};
    }
};

int cmd_spectrum(const SpectrumArgs& a, const fs::path& out) {
    if (a.ensemble != "goe" && a.ensemble != "gue") {
        throw Error(ErrorKind::invalid_parameter, "--ensemble must be goe or gue");
    }
    if (a.format != "csv" && a.format != "json") throw Error(ErrorKind::invalid_parameter, "--format must be csv or json");
    const int beta = a.ensemble == "goe" ? 1 : 2;
    const EnsembleSpec spec{beta, a.n, a.k, a.seed};
    spec.validate();
    if (static_cast<long>(a.n) * a.n > kDefaultDenseCap) {
        throw Error(ErrorKind::capacity, "--n " + std::to_string(a.n) + " exceeds the dense limit N <= 64");
    }
    fs::create_directories(out);
    Manifest man("spectrum", out);

    auto t0 = Clock::now();
    const auto model = sample_model(spec, a.gamma);
    const auto sup = build_superoperator(model);
    man.stage("build_s", t0);

    t0 = Clock::now();
    SpectrumOptions opt;
    opt.vectors = a.vectors;
    const Spectrum s = full_spectrum(sup, opt);
    man.stage("eig_s", t0);

    json gap = nullptr;
    if (a.gamma > 0.0) {
        if (s.zero_modes.size() != 1) {
            throw Error(ErrorKind::degenerate_steady_state, std::to_string(s.zero_modes.size()) + " zero modes");
        }
        const auto g = gap_report(s);
        gap = {{"gap", g.gap}, {"d23", report::num(g.d23)}};
    }
    for (const cplx z : s.eigenvalues) {
        if (z.real() > Tolerances{}.zero * s.scale) {
            throw Error(ErrorKind::invariant_violation, "eigenvalue with positive real part " + io::fmt(z.real()));
        }
    }

    if (a.format == "csv") {
        report::write_csv(man.path("spectrum.csv"), [&](std::ostream& os) { write_spectrum_csv(os, s); });
    } else {
        json ev = json::array();
        for (int i = 0; i < s.size(); ++i) {
            const cplx z = s.eigenvalues[static_cast<std::size_t>(i)];
            ev.push_back({{"index", i},
                          {"re", z.real()},
                          {"im", z.imag()},
                          {"residual", report::num(s.residuals[static_cast<std::size_t>(i)])},
                          {"class", to_string(s.classes[static_cast<std::size_t>(i)])}});
        }
        report::write_json(man.path("spectrum.json"),
                           {{"n", a.n}, {"gamma", a.gamma}, {"beta", beta}, {"k", a.k}, {"seed", a.seed},
                            {"zero_modes", s.zero_modes.size()}, {"gap", gap}, {"eigenvalues", ev}});
    }
    man.write(a.to_json(), a.seed);
    return kExitOk;
}

// --------------------------------------------------------------- reproduce

struct ReproduceArgs {
    std::string figure;
    std::string scale = "desk";
    std::optional<int> realizations;  // overrides the recipe count
    std::uint64_t seed = 2024;
    int workers = 1;

    json to_json() const {
        json j = {{"figure", figure}, {"scale", scale}, {"seed", seed}};
        j["realizations"] = realizations ? json(*realizations) : json(nullptr);
        return j;
    }
};

const std::vector<std::string> kFigures = {"fig1a", "fig1b", "fig2", "fig3", "fig4", "sm_fig1", "sm_fig3", "sm_fig4", "sm_fig5"};

/// Rough single-thread cost of one dense diagonalization.
double seconds_per_draw(int n) {
    const double dim = static_cast<double>(n) * n;
    return 3.9e-10 * dim * dim * dim + 2e-5;
}

void print_estimate(const std::string& fig, double seconds, int workers) {
    std::cerr << "reproduce " << fig << ": estimated " << static_cast<long>(seconds / workers + 0.5) << " s on "
              << workers << " worker(s)\n";
}

class Reproducer {
public:
    Reproducer(const ReproduceArgs& a, Manifest& man) : a_(a), man_(man) {}

    int R(int desk, int paper) const { return a_.realizations ? *a_.realizations : (paper_scale() ? paper : desk); }
    bool paper_scale() const { return a_.scale == "paper"; }

    void check_cap(int n) const {
        if (static_cast<long>(n) * n > kDefaultDenseCap) {
            throw Error(ErrorKind::capacity, "N=" + std::to_string(n) + " exceeds the dense limit N <= 64 (estimated " +
                                                 std::to_string(static_cast<long>(seconds_per_draw(n))) +
                                                 " s and " + std::to_string(static_cast<long>(n) * n * n * n * 16 / 1000000) +
                                                 " MB per draw)");
        }
    }

    json run() {
        const auto& f = a_.figure;
        if (f == "fig1a") return fig1a();
        if (f == "fig1b") return fig1b();
        if (f == "fig2") return fig2();
        if (f == "fig3") return fig3();
        if (f == "fig4") return tails("fig4", 1, 1, {3, 5, 7}, R(200000, 500000));
        if (f == "sm_fig1") return sm_fig1();
        if (f == "sm_fig3") return sm_fig3();
        if (f == "sm_fig4") return projections("sm_fig4", 50.0, paper_scale() ? 100 : 48, R(60, 100));
        if (f == "sm_fig5") return sm_fig5();
        throw Error(ErrorKind::invalid_parameter, "unknown figure '" + f + "'");
    }

private:
    const ReproduceArgs& a_;
    Manifest& man_;

    SweepConfig base() const {
        SweepConfig c;
        c.base_seed = a_.seed;
        c.workers = a_.workers;
        return c;
    }

    json fig1a() {
        const std::vector<int> sizes = paper_scale() ? std::vector<int>{16, 32, 48, 64, 160} : std::vector<int>{8, 16, 24, 32};
        const std::vector<double> gammas{0.05, 0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50, 100};
        for (int n : sizes) check_cap(n);
        const int r = R(20, 100);
        double est = 0;
        for (int n : sizes) est += seconds_per_draw(n) * r * gammas.size();
        print_estimate("fig1a", est, a_.workers);
        auto c = base();
        for (double g : gammas)
            for (int n : sizes) c.grid.push_back({EnsembleSpec{1, n, 1, a_.seed}, g});
        c.realizations = r;
        c.observables = {Observable::gap};
        const auto rep = run_sweep(c);
        report::write_csv(man_.path("fig1a_gap.csv"), [&](std::ostream& os) {
            os << "gamma,n,median,q25,q75,count,median_over_half_gamma,median_times_half_gamma\n";
            for (const auto& p : rep.points) {
                const double h = p.point.gamma / 2;
                os << io::fmt(p.point.gamma) << ',' << p.point.spec.n << ',' << io::fmt(p.gap.median) << ','
                   << io::fmt(p.gap.q25) << ',' << io::fmt(p.gap.q75) << ',' << p.gap.count << ','
                   << io::fmt(p.gap.median / h) << ',' << io::fmt(p.gap.median * h) << '\n';
            }
        });
        report::write_csv(man_.path("fig1a_extrapolated.csv"), [&](std::ostream& os) {
            os << "gamma,median_extrapolated,method\n";
            for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                std::vector<double> v;
                for (std::size_t ni = 0; ni < sizes.size(); ++ni) v.push_back(rep.points[gi * sizes.size() + ni].gap.median);
                os << io::fmt(gammas[gi]) << ',' << io::fmt(extrapolate_inverse_n(sizes, v)) << ",linear_in_inverse_N\n";
            }
        });
        return report::to_json(rep);
    }

    json fig1b() {
        const std::vector<int> sizes = paper_scale() ? std::vector<int>{16, 24, 32, 48} : std::vector<int>{16, 32};
        const std::vector<double> gammas{2, 4, 6, 8, 12};
        const int r = R(50, 200);
        double est = 0;
        for (int n : sizes) est += seconds_per_draw(n) * r * gammas.size();
        print_estimate("fig1b", est, a_.workers);
        const auto flow = d23_flow(gammas, sizes, r, a_.seed, a_.workers);
        report::write_csv(man_.path("fig1b_d23.csv"), [&](std::ostream& os) { report::write_d23_csv(os, flow); });
        return report::to_json(flow);
    }

    json fig2() {
        const int n = paper_scale() ? 60 : 32;
        const int r = R(20, 100);
        print_estimate("fig2", seconds_per_draw(n) * r, a_.workers);
        auto c = base();
        c.grid = {{EnsembleSpec{1, n, 1, a_.seed}, 40.0}};
        c.realizations = r;
        c.observables = {Observable::spectrum};
        const auto rep = run_sweep(c);
        const auto& p = rep.points.front();
        report::write_csv(man_.path("fig2_plane.csv"), [&](std::ostream& os) { p.plane.write_csv(os); });
        report::write_csv(man_.path("fig2_re.csv"), [&](std::ostream& os) { p.re_hist.write_csv(os); });
        auto j = report::to_json(rep);
        j["small_lambda_real_fraction"] =
            p.small_total ? static_cast<double>(p.small_real) / static_cast<double>(p.small_total) : 0.0;
        return j;
    }

    json fig3() {
        const std::vector<int> sizes{24, 32, 48};
        const int r = R(10, 100);
        double est = 0;
        for (int n : sizes) est += 2 * seconds_per_draw(n) * r;
        print_estimate("fig3", est, a_.workers);
        json out = json::array();
        for (double g : {2.0, 50.0}) {
            const HistogramSpec window{Binning::linear, g > 10 ? -2.0 : -1.0, 0.0, 100};
            const auto er = dos_edge_curves(g, sizes, r, window, a_.seed, a_.workers);
            json curves = json::array();
            for (const auto& c : er.curves) {
                const std::string name = "fig3_gamma" + io::fmt(g) + "_n" + std::to_string(c.n) + ".csv";
                report::write_csv(man_.path(name), [&](std::ostream& os) { c.re_hist.write_csv(os); });
                curves.push_back({{"n", c.n}, {"max_slope", c.max_slope}, {"file", name}});
            }
            out.push_back({{"gamma", g}, {"curves", curves}, {"crossings", er.crossings}});
        }
        return out;
    }

    json tails(const std::string& fig, int beta, int k, const std::vector<int>& sizes, int r) {
        double est = 0;
        for (int n : sizes) est += seconds_per_draw(n) * r;
        print_estimate(fig, est, a_.workers);
        auto c = base();
        for (int n : sizes) c.grid.push_back({EnsembleSpec{beta, n, k, a_.seed}, 2.0});
        c.realizations = r;
        c.observables = {Observable::spectrum, Observable::gap};
        c.bins = PointBins::tails({EnsembleSpec{beta, 2, k, 0}, 2.0});
        const auto rep = run_sweep(c);
        json fits = json::array();
        for (const auto& p : rep.points) {
            const std::string tag = fig + "_beta" + std::to_string(beta) + "_k" + std::to_string(k) + "_n" +
                                    std::to_string(p.point.spec.n);
            report::write_csv(man_.path(tag + "_small_lambda.csv"), [&](std::ostream& os) { p.small_lambda_hist.write_csv(os); });
            report::write_csv(man_.path(tag + "_gap.csv"), [&](std::ostream& os) { p.gap_hist.write_csv(os); });
            json f = {{"n", p.point.spec.n}, {"beta", beta}, {"k", k},
                      {"expected_exponent", theory::gap_exponent(beta, k, p.point.spec.n)}};
            try {
                f["gap_fit"] = report::to_json(gap_tail_fit(p));
            } catch (const Error& e) {
                f["gap_fit"] = e.what();
            }
            fits.push_back(f);
        }
        auto j = report::to_json(rep);
        j["fits"] = fits;
        return j;
    }

    json sm_fig5() {
        json parts = json::array();
        parts.push_back(tails("sm_fig5", 2, 1, {3}, R(100000, 500000)));
        parts.push_back(tails("sm_fig5", 1, 2, {2}, R(200000, 500000)));
        parts.push_back(tails("sm_fig5", 1, 4, {2}, R(200000, 500000)));
        return parts;
    }

    json projections(const std::string& fig, double gamma, int n, int r) {
        check_cap(n);
        print_estimate(fig, seconds_per_draw(n) * r, a_.workers);
        const auto pr = projection_histograms(EnsembleSpec{1, n, 1, a_.seed}, gamma, r, a_.seed, a_.workers);
        report::write_csv(man_.path(fig + "_im.csv"), [&](std::ostream& os) { report::write_overlay_csv(os, pr.im_hist, pr.im_theory); });
        report::write_csv(man_.path(fig + "_re.csv"), [&](std::ostream& os) { report::write_overlay_csv(os, pr.re_hist, pr.re_theory); });
        return {{"n", n},
                {"gamma", gamma},
                {"realizations", r},
                {"accepted", pr.point.accepted},
                {"im_sup_cdf_distance", pr.im_distance},
                {"re_sup_cdf_distance", pr.re_distance},
                {"re_mean", pr.re_mean},
                {"re_std", pr.re_std}};
    }

    // Weak dissipation: Im projection plus the Laplace-transform form factor.
    json sm_fig1() {
        json j = projections("sm_fig1", 0.005, paper_scale() ? 100 : 48, R(100, 100));
        const int n = 32;
        const int r = R(200, 1000);
        print_estimate("sm_fig1 form factor", seconds_per_draw(n) * r, a_.workers);
        std::vector<double> times;
        for (int t = 0; t <= 100; ++t) times.push_back(0.5 * t);
        const auto rows = numerical_form_factor(EnsembleSpec{1, n, 1, a_.seed}, 0.1, r, times, a_.seed, a_.workers);
        report::write_csv(man_.path("sm_fig1_form_factor.csv"), [&](std::ostream& os) { report::write_form_factor_csv(os, rows); });
        report::write_csv(man_.path("sm_fig1_form_factor_theory.csv"),
                          [&](std::ostream& os) { report::write_form_factor_theory_csv(os, rows); });
        j["form_factor"] = {{"n", n}, {"gamma", 0.1}, {"realizations", r}};
        return j;
    }

    json sm_fig3() {
        const std::vector<int> sizes = paper_scale() ? std::vector<int>{32, 64, 128, 256} : std::vector<int>{32, 64};
        const int r = R(100, 1000);
        const double gamma = 100.0;
        auto c = base();
        for (int n : sizes) c.grid.push_back({EnsembleSpec{1, n, 1, a_.seed}, gamma});
        c.realizations = r;
        c.observables = {Observable::effective_model};
        c.dense_cap = std::numeric_limits<int>::max();
        const auto rep = run_sweep(c);
        json out = json::array();
        for (const auto& p : rep.points) {
            const int n = p.point.spec.n;
            Histogram h({Binning::linear, -0.2, 0.0, 200});
            for (const auto& s : p.effective_spectra)
                for (std::size_t i = 1; i < s.size(); ++i) h.add(s[i]);
            const auto peaks = effective_peaks(p.effective_spectra, gamma, std::min(10, n - 2));
            const std::string tag = "sm_fig3_n" + std::to_string(n);
            report::write_csv(man_.path(tag + "_density.csv"), [&](std::ostream& os) { h.write_csv(os); });
            report::write_csv(man_.path(tag + "_peaks.csv"), [&](std::ostream& os) { report::write_peaks_csv(os, peaks); });
            out.push_back({{"n", n}, {"resolved_peaks", resolved_peak_count(peaks)}, {"accepted", p.accepted}});
        }
        return out;
    }
};

int cmd_reproduce(const ReproduceArgs& a, const fs::path& out) {
    if (std::find(kFigures.begin(), kFigures.end(), a.figure) == kFigures.end()) {
        throw Error(ErrorKind::invalid_parameter, "unknown figure '" + a.figure + "'");
    }
    if (a.scale != "desk" && a.scale != "paper") throw Error(ErrorKind::invalid_parameter, "--scale must be desk or paper");
    if (a.realizations && *a.realizations < 1) throw Error(ErrorKind::invalid_parameter, "--realizations must be >= 1");
    fs::create_directories(out);
    Manifest man("reproduce " + a.figure, out);
    Reproducer rep(a, man);
    const auto t0 = Clock::now();
    const json summary = rep.run();
    man.stage("run_s", t0);
    report::write_json(man.path(a.figure + "_summary.json"), summary);
    man.write(a.to_json(), a.seed);
    return kExitOk;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
    int n = 16;
    std::vector<double> gammas{0.0, 0.1, 1.0, 10.0, 100.0};
    std::uint64_t seed = 0;
    int trials = 200;
    std::string fault = "none";

    json to_json() const {
        return {{"n", n}, {"gammas", gammas}, {"seed", seed}, {"trials", trials}, {"fault", fault}};
    }
};

int cmd_validate(const ValidateArgs& a, const std::optional<fs::path>& out) {
    ValidationConfig c;
    c.n_max = a.n;
    c.n_min = std::min(2, a.n);
    c.gammas = a.gammas;
    c.seed = a.seed;
    c.trials = a.trials;
    if (a.fault == "sign-flip") {
        c.fault = Fault::sign_flip;
    } else if (a.fault != "none") {
        throw Error(ErrorKind::invalid_parameter, "unknown fault '" + a.fault + "'");
    }
    const auto rep = run_structural_suite(c);
    json inv = json::array();
    for (const auto& r : rep.invariants) {
        json j = {{"name", r.name}, {"passed", r.passed()}, {"checked", r.checked}, {"failed", r.failed}, {"worst", r.worst}};
        if (!r.first_failure.empty()) j["first_failure"] = r.first_failure;
        inv.push_back(j);
    }
    const json j = {{"models", rep.models}, {"passed", rep.passed()}, {"invariants", inv}};
    std::cout << j.dump(2) << '\n';
    if (out) {
        fs::create_directories(*out);
        Manifest man("validate", *out);
        report::write_json(man.path("validate.json"), j);
        man.write(a.to_json(), a.seed);
    }
    return rep.passed() ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    lapack::ensure_reliable_backend(argv);

    CLI::App app{"Spectra of random Lindbladians with Hermitian jump operators"};
    app.set_version_flag("--version", std::string(LINDBLAD_VERSION));
    app.require_subcommand(1);

    std::string config_path;
    int workers_flag = 0;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    auto* workers_opt = app.add_option("--workers", workers_flag, "Worker threads (default: $LINDBLAD_RMT_WORKERS or all cores)")
                            ->check(CLI::PositiveNumber);
    auto* out_opt = app.add_option("--out", out_dir, "Output directory");

    // spectrum
    SpectrumArgs sf;
    auto* sp = app.add_subcommand("spectrum", "Full spectrum of one sampled model");
    std::map<std::string, CLI::Option*> so;
    so["n"] = sp->add_option("--n", sf.n, "Hilbert-space dimension N (N^2 <= 4096)");
    so["gamma"] = sp->add_option("--gamma", sf.gamma, "Dissipation strength");
    so["ensemble"] = sp->add_option("--ensemble", sf.ensemble, "goe or gue");
    so["beta"] = sp->add_option("--beta", "Dyson index, alternative to --ensemble (1 or 2)");
    so["k"] = sp->add_option("--k", sf.k, "Number of jump operators");
    so["seed"] = sp->add_option("--seed", sf.seed, "Random seed");
    so["format"] = sp->add_option("--format", sf.format, "csv or json");
    auto* sp_out = sp->add_option("--out", out_dir, "Output directory");
    bool no_vectors = false;
    sp->add_flag("--no-vectors", no_vectors, "Skip eigenvectors and residual checks");

    // reproduce
    ReproduceArgs rf;
    int realizations_flag = 0;
    auto* rp = app.add_subcommand("reproduce", "Regenerate the data behind a figure");
    auto* fig_opt = rp->add_option("figure", rf.figure, "Figure id")->required();
    std::string figs;
    for (const auto& f : kFigures) figs += (figs.empty() ? "" : ", ") + f;
    fig_opt->description("Figure id: " + figs);
    auto* scale_opt = rp->add_option("--scale", rf.scale, "desk or paper");
    auto* real_opt = rp->add_option("--realizations", realizations_flag, "Override the recipe's realization count");
    auto* rseed_opt = rp->add_option("--seed", rf.seed, "Base seed");
    auto* rp_out = rp->add_option("--out", out_dir, "Output directory");

    // validate
    ValidateArgs vf;
    auto* va = app.add_subcommand("validate", "Structural invariant suite over seeded models");
    auto* vn = va->add_option("--n", vf.n, "Largest N in the suite");
    auto* vg = va->add_option("--gamma", vf.gammas, "Gamma grid")->expected(1, -1);
    auto* vs = va->add_option("--seed", vf.seed, "Seed");
    auto* vt = va->add_option("--trials", vf.trials, "Number of models");
    auto* vfault = va->add_option("--inject-fault", vf.fault, "Test hook: none or sign-flip")->group("");
    auto* va_out = va->add_option("--out", out_dir, "Also write validate.json and a manifest here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const json cfg = load_config(config_path);
        const bool out_given = out_opt->count() > 0 || sp_out->count() > 0 || rp_out->count() > 0 || va_out->count() > 0;
        if (!out_given && cfg.contains("out")) out_dir = cfg.at("out").get<std::string>();
        int workers = default_workers();
        merge(workers, workers_opt, cfg, "workers", workers_flag);

        if (sp->parsed()) {
            SpectrumArgs a;
            const json c = cfg.value("spectrum", json::object());
            merge(a.n, so["n"], c, "n", sf.n);
            merge(a.gamma, so["gamma"], c, "gamma", sf.gamma);
            merge(a.ensemble, so["ensemble"], c, "ensemble", sf.ensemble);
            merge(a.k, so["k"], c, "k", sf.k);
            merge(a.seed, so["seed"], c, "seed", sf.seed);
            merge(a.format, so["format"], c, "format", sf.format);
            if (so["beta"]->count() > 0) {
                const int beta = so["beta"]->as<int>();
                if (beta != 1 && beta != 2) throw Error(ErrorKind::invalid_parameter, "--beta must be 1 or 2");
                const std::string implied = beta == 1 ? "goe" : "gue";
                if (so["ensemble"]->count() > 0 && sf.ensemble != implied) {
                    throw Error(ErrorKind::invalid_parameter, "conflicting flags: --beta " + std::to_string(beta) +
                                                                  " and --ensemble " + sf.ensemble);
                }
                a.ensemble = implied;
            }
            a.vectors = no_vectors ? false : c.value("vectors", true);
            return cmd_spectrum(a, out_dir);
        }
        if (rp->parsed()) {
            ReproduceArgs a;
            const json c = cfg.value("reproduce", json::object());
            a.figure = rf.figure;
            merge(a.scale, scale_opt, c, "scale", rf.scale);
            merge(a.seed, rseed_opt, c, "seed", rf.seed);
            int r = 0;
            merge(r, real_opt, c, "realizations", realizations_flag);
            if (real_opt->count() > 0 || c.contains("realizations")) a.realizations = r;
            a.workers = workers;
            return cmd_reproduce(a, out_dir);
        }
        if (va->parsed()) {
            ValidateArgs a;
            const json c = cfg.value("validate", json::object());
            merge(a.n, vn, c, "n", vf.n);
            merge(a.gammas, vg, c, "gammas", vf.gammas);
            merge(a.seed, vs, c, "seed", vf.seed);
            merge(a.trials, vt, c, "trials", vf.trials);
            merge(a.fault, vfault, c, "fault", vf.fault);
            std::optional<fs::path> out;
            if (out_given || cfg.contains("out")) out = out_dir;
            return cmd_validate(a, out);
        }
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
