#include "shrinkmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "shrinkmc/error.hpp"

namespace shrinkmc {

namespace {

/// Centered copy of a series with its biased variance; rho(k) is the lag-k
/// sample autocorrelation. autocorr() and the ESS estimator both go through
/// this so their lag-one values agree bit for bit.
class Autocorrelation {
public:
    explicit Autocorrelation(std::span<const double> series) : centered_(series.begin(), series.end()) {
        const auto [lo, hi] = std::minmax_element(centered_.begin(), centered_.end());
        if (centered_.empty() || *lo == *hi) throw DomainError("autocorrelation: zero variance");
        const double n = static_cast<double>(centered_.size());
        const double mean = std::accumulate(centered_.begin(), centered_.end(), 0.0) / n;
        for (double& x : centered_) x -= mean;
        gamma0_ = std::inner_product(centered_.begin(), centered_.end(), centered_.begin(), 0.0) / n;
    }

    std::size_t size() const { return centered_.size(); }

    double rho(std::size_t lag) const {
        if (lag == 0) return 1.0;
        const std::size_t n = centered_.size();
        double acc = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t) acc += centered_[t] * centered_[t + lag];
        return acc / static_cast<double>(n) / gamma0_;
    }

private:
    std::vector<double> centered_;
    double gamma0_ = 0.0;
};

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double autocorr(std::span<const double> series, std::size_t lag) {
    if (series.size() <= lag + 1) {
        throw DomainError("autocorrelation: series of length " + std::to_string(series.size()) +
                          " is too short for lag " + std::to_string(lag));
    }
    return Autocorrelation(series).rho(lag);
}

EssEstimate ess_geyer(std::span<const double> series) {
    if (series.size() < 100) {
        throw DomainError("effective sample size needs at least 100 draws, got " +
                          std::to_string(series.size()));
    }
    const Autocorrelation ac(series);
    const std::size_t n = ac.size();

    EssEstimate est;
    double sum = 0.0;
    double previous = 0.0;
    for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
        const double even = ac.rho(2 * m);
        const double odd = ac.rho(2 * m + 1);
        est.rho.push_back(even);
        est.rho.push_back(odd);
        double pair = even + odd;
        if (!(pair > 0.0)) break;
        if (m > 0) pair = std::min(pair, previous);
        sum += pair;
        previous = pair;
    }
    est.tau = -1.0 + 2.0 * sum;
    const double dn = static_cast<double>(n);
    est.ess = est.tau > 1.0 ? dn / est.tau : dn;
    return est;
}

double ess_univariate(std::span<const double> series) { return ess_geyer(series).ess; }

double ess_per_second(double ess, double wall_time_seconds) {
    if (!(wall_time_seconds > 0.0) || !std::isfinite(wall_time_seconds)) {
        throw DomainError("ess per second: wall time must be positive, got " +
                          std::to_string(wall_time_seconds));
    }
    return ess / wall_time_seconds;
}

double quantile(std::span<const double> series, double q) {
    if (series.empty()) throw DomainError("quantile of an empty series");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, q);
}

Summary summarize(std::span<const double> series) {
    if (series.empty()) throw DomainError("summary of an empty series");
    const double n = static_cast<double>(series.size());
    Summary s;
    s.mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    if (series.size() > 1) {
        // Corrected two-pass: the second term removes the rounding error of the mean.
        double sum = 0.0, ss = 0.0;
        for (double x : series) {
            sum += x - s.mean;
            ss += (x - s.mean) * (x - s.mean);
        }
        ss = std::max(0.0, ss - sum * sum / n);
        s.sd = std::sqrt(ss / (n - 1.0));
    }
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    s.q025 = quantile_sorted(sorted, 0.025);
    s.q50 = quantile_sorted(sorted, 0.5);
    s.q975 = quantile_sorted(sorted, 0.975);
    return s;
}

DiagnosticsReport diagnose(std::span<const double> series, double wall_time_seconds) {
    DiagnosticsReport r;
    const EssEstimate est = ess_geyer(series);
    r.rho1 = est.rho.size() > 1 ? est.rho[1] : autocorr(series, 1);
    r.ess = est.ess;
    r.ess_per_second = ess_per_second(r.ess, wall_time_seconds);
    r.summary = summarize(series);
    return r;
}

}  // namespace shrinkmc
