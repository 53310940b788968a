#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "lindblad/error.hpp"
#include "lindblad/io.hpp"

namespace lindblad {

enum class Binning { linear, log };

struct HistogramSpec {
    Binning binning = Binning::linear;
    double lo = 0.0;
    double hi = 1.0;
    int bins = 50;  // for log binning: total bin count across [lo, hi]

    void validate() const {
        if (bins < 1) throw Error(ErrorKind::invalid_parameter, "histogram needs at least one bin");
        if (!(hi > lo)) throw Error(ErrorKind::invalid_parameter, "histogram bins must be strictly increasing");
        if (binning == Binning::log && !(lo > 0.0)) {
            throw Error(ErrorKind::invalid_parameter, "log binning needs lo > 0");
        }
    }

    std::vector<double> edges() const {
        validate();
        std::vector<double> e(static_cast<std::size_t>(bins) + 1);
        for (int b = 0; b <= bins; ++b) {
            const double u = static_cast<double>(b) / bins;
            e[static_cast<std::size_t>(b)] =
                binning == Binning::linear ? lo + (hi - lo) * u : lo * std::pow(hi / lo, u);
        }
        e.back() = hi;
        return e;
    }

    /// Log bins with a fixed number per decade.
    static HistogramSpec log_decades(double lo, double hi, int per_decade) {
        const int bins = std::max(1, static_cast<int>(std::lround(std::log10(hi / lo) * per_decade)));
        return {Binning::log, lo, hi, bins};
    }
};

/// One-dimensional histogram. Events outside [lo, hi) go to underflow or
/// overflow, so `events()` is the number of samples added. Densities are
/// normalized by all events, which makes them densities of the full
/// distribution restricted to the binned range.
class Histogram {
public:
    Histogram() = default;
    explicit Histogram(HistogramSpec spec) : spec_(spec), edges_(spec.edges()), counts_(edges_.size() - 1, 0) {}

    const HistogramSpec& spec() const noexcept { return spec_; }
    const std::vector<double>& edges() const noexcept { return edges_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t underflow() const noexcept { return under_; }
    std::uint64_t overflow() const noexcept { return over_; }
    std::uint64_t events() const noexcept { return events_; }
    int bins() const noexcept { return static_cast<int>(counts_.size()); }

    void add(double x) {
        ++events_;
        if (std::isnan(x) || x < edges_.front()) {
            ++under_;
            return;
        }
        if (x >= edges_.back()) {
            ++over_;
            return;
        }
        auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
        ++counts_[static_cast<std::size_t>(it - edges_.begin() - 1)];
    }

    void merge(const Histogram& other) {
        if (other.edges_ != edges_) throw Error(ErrorKind::dimension_mismatch, "histogram edges differ");
        for (std::size_t b = 0; b < counts_.size(); ++b) counts_[b] += other.counts_[b];
        under_ += other.under_;
        over_ += other.over_;
        events_ += other.events_;
    }

    double width(int b) const { return edges_[static_cast<std::size_t>(b) + 1] - edges_[static_cast<std::size_t>(b)]; }
    double center(int b) const {
        const double l = edges_[static_cast<std::size_t>(b)], h = edges_[static_cast<std::size_t>(b) + 1];
        return spec_.binning == Binning::log ? std::sqrt(l * h) : 0.5 * (l + h);
    }
    double density(int b) const {
        if (events_ == 0) return 0.0;
        return static_cast<double>(counts_[static_cast<std::size_t>(b)]) / (static_cast<double>(events_) * width(b));
    }

    /// `bin_lo,bin_hi,count,density`
    void write_csv(std::ostream& os) const {
        os << "bin_lo,bin_hi,count,density\n";
        for (int b = 0; b < bins(); ++b) {
            os << io::fmt(edges_[static_cast<std::size_t>(b)]) << ',' << io::fmt(edges_[static_cast<std::size_t>(b) + 1])
               << ',' << counts_[static_cast<std::size_t>(b)] << ',' << io::fmt(density(b)) << '\n';
        }
    }

private:
    HistogramSpec spec_{};
    std::vector<double> edges_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t under_ = 0, over_ = 0, events_ = 0;
};

/// Two-dimensional linear histogram, used for the eigenvalue density in the
/// complex plane (x = Re, y = Im).
class Histogram2D {
public:
    Histogram2D() = default;
    Histogram2D(HistogramSpec x, HistogramSpec y)
        : x_(x), y_(y), counts_(static_cast<std::size_t>(x.bins) * static_cast<std::size_t>(y.bins), 0) {
        x.validate();
        y.validate();
        if (x.binning != Binning::linear || y.binning != Binning::linear) {
            throw Error(ErrorKind::invalid_parameter, "2D histogram supports linear bins only");
        }
    }

    void add(double x, double y) {
        ++events_;
        const int bx = static_cast<int>(std::floor((x - x_.lo) / (x_.hi - x_.lo) * x_.bins));
        const int by = static_cast<int>(std::floor((y - y_.lo) / (y_.hi - y_.lo) * y_.bins));
        if (bx < 0 || bx >= x_.bins || by < 0 || by >= y_.bins) return;
        ++counts_[static_cast<std::size_t>(bx) * static_cast<std::size_t>(y_.bins) + static_cast<std::size_t>(by)];
    }

    void merge(const Histogram2D& o) {
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
        events_ += o.events_;
    }

    std::uint64_t events() const noexcept { return events_; }
    std::uint64_t count(int bx, int by) const {
        return counts_[static_cast<std::size_t>(bx) * static_cast<std::size_t>(y_.bins) + static_cast<std::size_t>(by)];
    }

    /// `re_lo,re_hi,im_lo,im_hi,count,density`
    void write_csv(std::ostream& os) const {
        const double wx = (x_.hi - x_.lo) / x_.bins, wy = (y_.hi - y_.lo) / y_.bins;
        os << "re_lo,re_hi,im_lo,im_hi,count,density\n";
        for (int bx = 0; bx < x_.bins; ++bx) {
            for (int by = 0; by < y_.bins; ++by) {
                const auto c = count(bx, by);
                const double d = events_ ? static_cast<double>(c) / (static_cast<double>(events_) * wx * wy) : 0.0;
                os << io::fmt(x_.lo + bx * wx) << ',' << io::fmt(x_.lo + (bx + 1) * wx) << ',' << io::fmt(y_.lo + by * wy)
                   << ',' << io::fmt(y_.lo + (by + 1) * wy) << ',' << c << ',' << io::fmt(d) << '\n';
            }
        }
    }

private:
    HistogramSpec x_{}, y_{};
    std::vector<std::uint64_t> counts_;
    std::uint64_t events_ = 0;
};

struct Summary {
    std::size_t count = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stderr_mean = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double q25 = std::numeric_limits<double>::quiet_NaN();
    double q75 = std::numeric_limits<double>::quiet_NaN();
};

/// Linear-interpolated quantile of sorted data.
inline double quantile_sorted(std::span<const double> s, double q) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return s[lo] * (1.0 - w) + s[hi] * w;
}

/// NaN samples are ignored.
inline Summary summarize(std::span<const double> xs) {
    std::vector<double> v;
    v.reserve(xs.size());
    for (double x : xs) {
        if (!std::isnan(x)) v.push_back(x);
    }
    Summary s;
    s.count = v.size();
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stderr_mean = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    std::sort(v.begin(), v.end());
    s.median = quantile_sorted(v, 0.5);
    s.q25 = quantile_sorted(v, 0.25);
    s.q75 = quantile_sorted(v, 0.75);
    return s;
}

inline double median(std::span<const double> xs) { return summarize(xs).median; }

struct PowerLawFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_stderr = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double reduced_chi2 = std::numeric_limits<double>::quiet_NaN();  // fit residual
    double window_lo = 0.0, window_hi = 0.0;
    int bins_used = 0;
};

/// Weighted least-squares slope of log(density) against log(bin center) over
/// bins lying fully inside [lo, hi]. Weights are the bin counts (Poisson
/// variance of log count ~ 1/count), so the stderr is the statistical error
/// of the slope.
inline PowerLawFit fit_power_law(const Histogram& h, double lo, double hi, int min_bins = 10) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    PowerLawFit f;
    f.window_lo = lo;
    f.window_hi = hi;
    std::vector<std::array<double, 3>> pts;
    for (int b = 0; b < h.bins(); ++b) {
        const auto c = h.counts()[static_cast<std::size_t>(b)];
        if (c == 0) continue;
        if (h.edges()[static_cast<std::size_t>(b)] < lo * (1 - 1e-12) || h.edges()[static_cast<std::size_t>(b) + 1] > hi * (1 + 1e-12)) {
            continue;
        }
        const double x = std::log(h.center(b)), y = std::log(h.density(b)), w = static_cast<double>(c);
        pts.push_back({x, y, w});
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    f.bins_used = static_cast<int>(pts.size());
    if (f.bins_used < min_bins) {
        throw Error(ErrorKind::insufficient_data, "power-law fit needs at least " + std::to_string(min_bins) +
                                                      " populated bins in the window, found " + std::to_string(f.bins_used));
    }
    const double det = sw * sxx - sx * sx;
    f.slope = (sw * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / sw;
    double chi2 = 0.0;
    for (const auto& p : pts) {
        const double r = p[1] - (f.intercept + f.slope * p[0]);
        chi2 += p[2] * r * r;
    }
    f.reduced_chi2 = chi2 / (f.bins_used - 2);
    f.slope_stderr = std::sqrt(sw / det);
    return f;
}

/// Default window: two decades starting at the lower edge of the first bin
/// holding at least `min_count` events.
inline PowerLawFit fit_power_law(const Histogram& h, int min_count = 20, double decades = 2.0) {
    if (h.spec().binning != Binning::log) throw Error(ErrorKind::invalid_parameter, "tail fits need log bins");
    for (int b = 0; b < h.bins(); ++b) {
        if (h.counts()[static_cast<std::size_t>(b)] >= static_cast<std::uint64_t>(min_count)) {
            const double lo = h.edges()[static_cast<std::size_t>(b)];
            return fit_power_law(h, lo, lo * std::pow(10.0, decades));
        }
    }
    throw Error(ErrorKind::insufficient_data, "no bin reaches the minimum count");
}

/// sup_x |F_emp(x) - F(x)| for samples restricted to [lo, hi], with both
/// distributions conditioned on the window.
inline double sup_cdf_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                               double lo = -std::numeric_limits<double>::infinity(),
                               double hi = std::numeric_limits<double>::infinity()) {
    std::erase_if(samples, [&](double x) { return !(x >= lo && x <= hi); });
    if (samples.empty()) throw Error(ErrorKind::insufficient_data, "no samples in window");
    std::sort(samples.begin(), samples.end());
    const double f_lo = std::isfinite(lo) ? cdf(lo) : 0.0;
    const double f_hi = std::isfinite(hi) ? cdf(hi) : 1.0;
    const double mass = f_hi - f_lo;
    if (!(mass > 0.0)) throw Error(ErrorKind::insufficient_data, "theory has no mass in window");
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = (cdf(samples[i]) - f_lo) / mass;
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    return d;
}

/// Least-squares line through (1/N, y); returns the intercept, i.e. the value
/// extrapolated to 1/N = 0.
inline double extrapolate_inverse_n(std::span<const int> sizes, std::span<const double> values) {
    if (sizes.size() != values.size() || sizes.size() < 2) {
        throw Error(ErrorKind::insufficient_data, "extrapolation needs at least two sizes");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double x = 1.0 / sizes[i];
        sx += x;
        sy += values[i];
        sxx += x * x;
        sxy += x * values[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return (sy - slope * sx) / m;
}

}  // namespace lindblad
