// Acceptance suite: one PASS/FAIL line per criterion.
//   lindblad_acceptance            run all criteria
//   lindblad_acceptance 2 9 10     run a subset
// Workers come from LINDBLAD_RMT_WORKERS, else all cores. Exit status is
// nonzero when any selected criterion fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lindblad/ensemble.hpp"
#include "lindblad/lapack.hpp"
#include "lindblad/report.hpp"
#include "lindblad/validate.hpp"
#include "oracle.hpp"

using namespace lindblad;

namespace {

constexpr std::uint64_t kSeed = 2024;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int workers() {
    if (const char* w = std::getenv("LINDBLAD_RMT_WORKERS")) {
        const int v = std::atoi(w);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string f3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

void info(const std::string& s) { std::cout << "    info: " << s << '\n' << std::flush; }

// 1 -------------------------------------------------------------------------
Outcome structural() {
    ValidationConfig c;
    c.trials = 200;
    c.seed = kSeed;
    const auto rep = run_structural_suite(c);
    std::ostringstream d;
    d << rep.models << " models";
    for (const auto& r : rep.invariants) {
        d << "; " << r.name << " " << (r.checked - r.failed) << "/" << r.checked;
        if (r.failed) info(r.name + " first failure: " + r.first_failure);
    }
    return {rep.passed(), d.str()};
}

// 2, 3 ----------------------------------------------------------------------
struct TailCase {
    int beta, k, n, realizations;
};

Outcome tails(const std::vector<TailCase>& cases) {
    bool ok = true;
    std::ostringstream d;
    for (const auto& tc : cases) {
        SweepConfig c;
        c.grid = {{EnsembleSpec{tc.beta, tc.n, tc.k, kSeed}, 2.0}};
        c.realizations = tc.realizations;
        c.base_seed = kSeed;
        c.workers = workers();
        c.observables = {Observable::gap};
        c.bins = PointBins::tails(c.grid.front());
        const auto rep = run_sweep(c);
        const double expect = theory::gap_exponent(tc.beta, tc.k, tc.n);
        const auto& p = rep.points.front();
        d << (d.tellp() ? "; " : "") << "beta=" << tc.beta << " k=" << tc.k << " N=" << tc.n << ": ";
        try {
            const auto f = gap_tail_fit(p);
            const bool good = std::abs(f.slope - expect) <= 0.3;
            ok = ok && good;
            d << "slope " << f3(f.slope) << " (expected " << expect << ")";
            info("beta=" + std::to_string(tc.beta) + " k=" + std::to_string(tc.k) + " N=" + std::to_string(tc.n) +
                 " R=" + std::to_string(p.accepted) + " window [" + f3(f.window_lo) + ", " + f3(f.window_hi) +
                 "] bins " + std::to_string(f.bins_used) + " stderr " + f3(f.slope_stderr) + " chi2/dof " +
                 f3(f.reduced_chi2));
        } catch (const Error& e) {
            ok = false;
            d << e.what();
        }
    }
    return {ok, d.str()};
}

// 4 -------------------------------------------------------------------------
Outcome gap_law() {
    const std::vector<int> sizes{16, 24, 32, 48};
    const std::vector<double> gammas{0.2, 50.0};
    SweepConfig c;
    for (double g : gammas)
        for (int n : sizes) c.grid.push_back({EnsembleSpec{1, n, 1, kSeed}, g});
    c.realizations = 20;
    c.base_seed = kSeed;
    c.workers = workers();
    c.observables = {Observable::gap};
    const auto rep = run_sweep(c);
    auto median = [&](std::size_t gi, std::size_t ni) { return rep.points[gi * sizes.size() + ni].gap.median; };

    const double small = median(0, 3) / (0.2 / 2.0);
    const double large = median(1, 3) * (50.0 / 2.0);
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        std::vector<double> scaled;
        std::string per_n;
        for (std::size_t ni = 0; ni < sizes.size(); ++ni) {
            const double h = gammas[gi] / 2.0;
            scaled.push_back(gi == 0 ? median(gi, ni) / h : median(gi, ni) * h);
            per_n += " N=" + std::to_string(sizes[ni]) + ":" + f3(scaled.back());
        }
        info(std::string(gi == 0 ? "median gap/(gamma/2)" : "median gap*(gamma/2)") + " at gamma=" +
             f3(gammas[gi]) + ":" + per_n + "; linear-in-1/N extrapolation (a choice): " +
             f3(extrapolate_inverse_n(sizes, scaled)));
    }
    const bool ok = small >= 0.7 && small <= 1.3 && large >= 0.6 && large <= 1.4;
    return {ok, "N=48 R=20: gap/(gamma/2)=" + f3(small) + " at gamma=0.2 (need [0.7,1.3]); gap*(gamma/2)=" + f3(large) +
                    " at gamma=50 (need [0.6,1.4])"};
}

// 5 -------------------------------------------------------------------------
Outcome transition() {
    const auto flow = d23_flow({2, 4, 6, 8, 12}, {16, 32}, 50, kSeed, workers());
    std::string slopes;
    for (std::size_t i = 0; i < flow.gammas.size(); ++i) slopes += " " + f3(flow.gammas[i]) + ":" + f3(flow.slope[i]);
    info("d(median d23)/dN per gamma:" + slopes);
    if (!flow.gamma_c) return {false, flow.note};
    const double gc = *flow.gamma_c;
    return {gc >= 4.0 && gc <= 10.0, "gamma_c=" + f3(gc) + " (need [4,10])"};
}

// 6 -------------------------------------------------------------------------
Outcome effective() {
    const double gamma = 100.0;
    SweepConfig c;
    c.grid = {{EnsembleSpec{1, 32, 1, kSeed}, gamma}, {EnsembleSpec{1, 64, 1, kSeed}, gamma}};
    c.realizations = 100;
    c.base_seed = kSeed;
    c.workers = workers();
    c.observables = {Observable::effective_model};
    const auto rep = run_sweep(c);
    std::vector<int> resolved;
    std::vector<EffectivePeak> peaks64;
    for (const auto& p : rep.points) {
        const int n = p.point.spec.n;
        const auto peaks = effective_peaks(p.effective_spectra, gamma, std::min(10, n - 2));
        resolved.push_back(resolved_peak_count(peaks));
        std::string line = "N=" + std::to_string(n) + " resolved " + std::to_string(resolved.back()) + "; offsets";
        for (int m = 0; m < 3; ++m) line += " n=" + std::to_string(m + 1) + ":" + f3(peaks[static_cast<std::size_t>(m)].rel_offset);
        info(line);
        if (n == 64) peaks64 = peaks;
    }
    bool ok = resolved[1] > resolved[0];
    std::string d = "N=64 peak offsets";
    for (int m = 0; m < 3; ++m) {
        const double off = peaks64[static_cast<std::size_t>(m)].rel_offset;
        ok = ok && off <= 0.15;
        d += " " + f3(100 * off) + "%";
    }
    d += " (need <= 15%); resolved peaks N=32:" + std::to_string(resolved[0]) + " N=64:" + std::to_string(resolved[1]);
    return {ok, d};
}

// 7 -------------------------------------------------------------------------
Outcome projections() {
    const auto weak = projection_histograms(EnsembleSpec{1, 48, 1, kSeed}, 0.005, 100, kSeed, workers());
    const auto strong = projection_histograms(EnsembleSpec{1, 48, 1, kSeed + 1}, 50.0, 60, kSeed + 1, workers());
    info("gamma=50 Re mean " + f3(strong.re_mean) + " (large-gamma " + f3(theory::large_gamma_x_mean(50)) + "), std " +
         f3(strong.re_std) + " (" + f3(theory::large_gamma_x_std(50)) + ")");
    const bool ok = weak.im_distance < 0.05 && strong.re_distance < 0.1;
    return {ok, "Im distance " + f3(weak.im_distance) + " at gamma=0.005 (need < 0.05); Re distance " +
                    f3(strong.re_distance) + " at gamma=50 (need < 0.1)"};
}

// 8 -------------------------------------------------------------------------
Outcome form_factor() {
    std::vector<double> times{0.0};
    for (int t = 5; t <= 50; t += 5) times.push_back(t);
    const int n = 32;
    const auto rows = numerical_form_factor(EnsembleSpec{1, n, 1, kSeed}, 0.1, 200, times, kSeed, workers());
    const bool exact0 = rows.front().re_f == static_cast<double>(n * n);
    double worst = 0.0, worst_t = 0.0;
    std::string line;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double rel = std::abs(rows[i].re_f - rows[i].predicted) / std::abs(rows[i].predicted);
        line += " t=" + f3(rows[i].t) + ":" + f3(100 * rel) + "%";
        if (rel > worst) {
            worst = rel;
            worst_t = rows[i].t;
        }
    }
    info("relative deviation" + line);
    return {exact0 && worst <= 0.10, std::string("F(0)=N^2 ") + (exact0 ? "exact" : "NOT exact") +
                                          "; worst deviation " + f3(100 * worst) + "% at t=" + f3(worst_t) +
                                          " (need <= 10% on [5,50])"};
}

// 9 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
    double worst_eig = 0.0;
    for (std::uint32_t r = 0; r < 1000; ++r) {
        const int beta = 1 + static_cast<int>(r % 2);
        const int k = 1 + static_cast<int>((r / 2) % 3);
        const double gamma = std::pow(10.0, -2.0 + 4.0 * ((r * 7) % 17) / 16.0);
        const auto sup = build_superoperator(sample_model(EnsembleSpec{beta, 2, k, kSeed}, gamma, StreamKey{kSeed, 9, r, 0}));
        const auto s = full_spectrum(sup);
        worst_eig = std::max(worst_eig, oracle::match_distance(s.eigenvalues, oracle::roots(oracle::char_poly(sup.dense()))));
    }
    double worst_apply = 0.0;
    for (std::uint32_t r = 0; r < 100; ++r) {
        const int beta = 1 + static_cast<int>(r % 2);
        const int n = 2 + static_cast<int>(r % 15);
        const auto model = sample_model(EnsembleSpec{beta, n, 1 + static_cast<int>(r % 3), kSeed}, 0.5 * r,
                                        StreamKey{kSeed, 10, r, 0});
        const auto sup = build_superoperator(model);
        const auto a = sample_hermitian(2, n, CounterRng(StreamKey{kSeed, 11, r, 0}));
        CMatrix rho = a.dense() * a.dense();
        rho /= rho.trace().real();
        const CVector dense = sup.dense() * vectorize(rho);
        const CVector free = vectorize(lindblad::apply(model, rho));
        worst_apply = std::max(worst_apply, (dense - free).cwiseAbs().maxCoeff() / std::max(1.0, sup.max_abs()));
    }
    return {worst_eig <= 1e-8 && worst_apply <= 1e-12,
            "N=2 oracle worst " + f3(worst_eig) + " over 1000 draws (need <= 1e-8); apply vs dense worst " +
                f3(worst_apply) + " over 100 draws (need <= 1e-12)"};
}

// 10 ------------------------------------------------------------------------
std::vector<std::string> write_sweep(const EnsembleReport& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> names{"report.json"};
    report::write_json(dir / "report.json", report::to_json(rep));
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const auto& p = rep.points[i];
        const std::string tag = "p" + std::to_string(i);
        auto put = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
            report::write_csv(dir / name, body);
            names.push_back(name);
        };
        put(tag + "_re.csv", [&](std::ostream& os) { p.re_hist.write_csv(os); });
        put(tag + "_im.csv", [&](std::ostream& os) { p.im_hist.write_csv(os); });
        put(tag + "_small.csv", [&](std::ostream& os) { p.small_lambda_hist.write_csv(os); });
        put(tag + "_gap.csv", [&](std::ostream& os) { p.gap_hist.write_csv(os); });
        put(tag + "_plane.csv", [&](std::ostream& os) { p.plane.write_csv(os); });
        put(tag + "_ff.csv", [&](std::ostream& os) { report::write_form_factor_csv(os, p.form_factor); });
    }
    return names;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    SweepConfig c;
    c.grid = {{EnsembleSpec{1, 6, 1, kSeed}, 0.3}, {EnsembleSpec{2, 5, 1, kSeed}, 4.0}, {EnsembleSpec{1, 8, 1, kSeed}, 30.0}};
    c.realizations = 60;
    c.base_seed = kSeed;
    c.observables = {Observable::spectrum, Observable::gap,        Observable::d23,
                     Observable::projections, Observable::form_factor, Observable::effective_model};
    c.times = {0.0, 1.0, 10.0};
    c.block = 5;
    const auto root = std::filesystem::temp_directory_path() / ("lindblad_acceptance_" + std::to_string(::getpid()));
    c.workers = 1;
    const auto names = write_sweep(run_sweep(c), root / "w1");
    c.workers = 8;
    write_sweep(run_sweep(c), root / "w8");
    int same = 0;
    for (const auto& n : names) same += slurp(root / "w1" / n) == slurp(root / "w8" / n);
    std::filesystem::remove_all(root);
    return {same == static_cast<int>(names.size()),
            std::to_string(same) + "/" + std::to_string(names.size()) + " data files byte-identical at 1 vs 8 workers"};
}

}  // namespace

int main(int argc, char** argv) {
    lapack::ensure_reliable_backend(argv);
    lapack::use_single_thread();

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"structural suite", structural},
        {"small-N tail exponents", [] { return tails({{1, 1, 3, 200000}, {1, 1, 5, 200000}, {1, 1, 7, 200000}}); }},
        {"GUE and multi-jump tails", [] { return tails({{2, 1, 3, 100000}, {1, 2, 2, 200000}, {1, 4, 2, 200000}}); }},
        {"gap law", gap_law},
        {"spectral transition", transition},
        {"effective model", effective},
        {"projections", projections},
        {"form factor", form_factor},
        {"oracle equivalence", oracle_equivalence},
        {"determinism", determinism},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    std::cout << "acceptance: workers=" << workers() << " seed=" << kSeed << '\n';
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first << "): " << o.detail
                  << " [" << f3(s) << " s]\n"
                  << std::flush;
    }
    return failed ? 1 : 0;
}
