#pragma once

#include <span>
#include <vector>

namespace shrinkmc {

/// Sample autocorrelation at `lag`: centered by the sample mean, both the
/// lagged covariance and the variance divided by N.
/// Throws DomainError for a constant series or lag + 1 >= N.
double autocorr(std::span<const double> series, std::size_t lag);

struct EssEstimate {
    double ess = 0.0;
    /// Integrated autocorrelation time N / ess before clamping.
    double tau = 0.0;
    /// rho_0, rho_1, ... up to the truncation point used in the sum.
    std::vector<double> rho;
};

/// Geyer's initial monotone positive sequence estimator. Pairs
/// Gamma_m = rho_{2m} + rho_{2m+1} are summed until the first non-positive
/// pair, each forced no larger than its predecessor; tau = -1 + 2 sum Gamma_m
/// and ess = N / tau clamped to (0, N]. Requires N >= 100.
EssEstimate ess_geyer(std::span<const double> series);

double ess_univariate(std::span<const double> series);

/// ess / wall time. Throws DomainError unless wall_time_seconds > 0.
double ess_per_second(double ess, double wall_time_seconds);

struct Summary {
    double mean = 0.0;
    double sd = 0.0;
    double q025 = 0.0;
    double q50 = 0.0;
    double q975 = 0.0;
};

/// Empirical quantile with linear interpolation between order statistics
/// x_(floor(h)) and x_(floor(h)+1), h = (N - 1) q (0-based).
double quantile(std::span<const double> series, double q);

/// Mean, sd (N - 1 denominator; 0 for N = 1) and 2.5/50/97.5% quantiles.
Summary summarize(std::span<const double> series);

struct DiagnosticsReport {
    double rho1 = 0.0;
    double ess = 0.0;
    double ess_per_second = 0.0;
    Summary summary;
};

DiagnosticsReport diagnose(std::span<const double> series, double wall_time_seconds);

}  // namespace shrinkmc
