#pragma once

// Seeded random variate generation.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard, seeded through std::seed_seq (also fully specified). Every
// transform below is written out here rather than taken from <random>'s
// distributions, whose algorithms are implementation defined, so draws are
// reproducible across standard libraries.

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

namespace shrinkmc {

/// A reproducible random stream identified by (seed, stream id). Not safe to
/// share between threads; give each chain its own.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Independent stream keyed on this stream's seed and a child id.
    RngStream split(std::uint64_t child) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    double uniform();

    /// Spare normal deviate from the polar method.
    bool has_spare_normal() const { return has_spare_; }

private:
    friend double sample_std_normal(RngStream& rng);

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// 64-bit seed derived from a master seed and a key path, e.g.
/// derive_seed(master, {cell, replication, role}).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

double sample_std_normal(RngStream& rng);
double sample_normal(double mean, double sd, RngStream& rng);
Eigen::VectorXd sample_std_normal_vector(Eigen::Index size, RngStream& rng);

/// Gamma(shape, rate), mean shape / rate. Marsaglia-Tsang squeeze; shapes
/// below one are boosted through U^{1/shape}.
double sample_gamma(double shape, double rate, RngStream& rng);

/// Inverse-Gamma(shape, scale) = scale / Gamma(shape, 1).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);

/// Inverse-Gaussian with mean `mu` and shape `lambda`: density proportional
/// to x^{-3/2} exp(-lambda (x - mu)^2 / (2 mu^2 x)), variance mu^3 / lambda.
/// Michael-Schucany-Haas transformation (one chi-square, one uniform).
double sample_inverse_gaussian(double mu, double lambda, RngStream& rng);

/// Student t with `df` degrees of freedom, as Z / sqrt(chi2_df / df).
double sample_student_t(double df, RngStream& rng);

/// N(precision^{-1} b, sigma2 * precision^{-1}) from one Cholesky
/// factorization of `precision`.
Eigen::VectorXd sample_mvn_precision(const Eigen::VectorXd& b, const Eigen::MatrixXd& precision,
                                     double sigma2, RngStream& rng);

}  // namespace shrinkmc
