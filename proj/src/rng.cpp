#include "shrinkmc/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "shrinkmc/error.hpp"

namespace shrinkmc {

namespace {

constexpr std::uint32_t kDomainTag = 0x53484b4d;  // "SHKM"

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

void require_positive(const char* dist, const char* name, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(dist) + ": " + name + " must be positive and finite, got " +
                          std::to_string(value));
    }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::seed_seq seq{lo32(seed), hi32(seed), lo32(stream), hi32(stream), kDomainTag};
    engine_.seed(seq);
}

RngStream RngStream::split(std::uint64_t child) const {
    return RngStream(derive_seed(seed_, {stream_, child}), child);
}

double RngStream::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::vector<std::uint32_t> words{lo32(master), hi32(master)};
    for (std::uint64_t key : path) {
        words.push_back(lo32(key));
        words.push_back(hi32(key));
    }
    words.push_back(kDomainTag);
    std::seed_seq seq(words.begin(), words.end());
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double sample_std_normal(RngStream& rng) {
    if (rng.has_spare_) {
        rng.has_spare_ = false;
        return rng.spare_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * rng.uniform() - 1.0;
        v = 2.0 * rng.uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    rng.spare_ = v * f;
    rng.has_spare_ = true;
    return u * f;
}

double sample_normal(double mean, double sd, RngStream& rng) {
    return mean + sd * sample_std_normal(rng);
}

Eigen::VectorXd sample_std_normal_vector(Eigen::Index size, RngStream& rng) {
    Eigen::VectorXd z(size);
    for (Eigen::Index i = 0; i < size; ++i) z[i] = sample_std_normal(rng);
    return z;
}

double sample_gamma(double shape, double rate, RngStream& rng) {
    require_positive("gamma", "shape", shape);
    require_positive("gamma", "rate", rate);
    if (shape < 1.0) {
        const double g = sample_gamma(shape + 1.0, 1.0, rng);
        const double u = rng.uniform();
        return g * std::exp(std::log(u) / shape) / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_std_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
    require_positive("inverse gamma", "shape", shape);
    require_positive("inverse gamma", "scale", scale);
    return scale / sample_gamma(shape, 1.0, rng);
}

double sample_inverse_gaussian(double mu, double lambda, RngStream& rng) {
    require_positive("inverse gaussian", "mu", mu);
    require_positive("inverse gaussian", "lambda", lambda);
    const double z = sample_std_normal(rng);
    const double y = z * z;
    // Roots of the transformed chi-square are mu / r and mu * r with
    // r = 1 + t + sqrt(t^2 + 2t); both forms avoid cancellation.
    const double t = 0.5 * mu * y / lambda;
    const double r = 1.0 + t + std::sqrt(t * (t + 2.0));
    const double u = rng.uniform();
    if (u * (r + 1.0) <= r) return mu / r;
    return mu * r;
}

double sample_student_t(double df, RngStream& rng) {
    require_positive("student t", "df", df);
    const double z = sample_std_normal(rng);
    const double scaled_chi2 = sample_gamma(0.5 * df, 0.5 * df, rng);
    return z / std::sqrt(scaled_chi2);
}

Eigen::VectorXd sample_mvn_precision(const Eigen::VectorXd& b, const Eigen::MatrixXd& precision,
                                     double sigma2, RngStream& rng) {
    require_positive("mvn", "sigma2", sigma2);
    if (precision.rows() != precision.cols() || precision.rows() != b.size()) {
        throw DimensionError("mvn: precision is " + std::to_string(precision.rows()) + "x" +
                             std::to_string(precision.cols()) + " but b has length " +
                             std::to_string(b.size()));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) throw NumericalError("mvn: precision is not positive definite");
    const Eigen::VectorXd mean = llt.solve(b);
    const Eigen::VectorXd w = sample_std_normal_vector(b.size(), rng);
    return mean + std::sqrt(sigma2) * Eigen::VectorXd(llt.matrixU().solve(w));
}

}  // namespace shrinkmc
