#include "shrinkmc/simgen.hpp"

#include <cmath>
#include <string>

#include "shrinkmc/error.hpp"

namespace shrinkmc {

namespace {

constexpr Index kGroupSize = 5;
constexpr Index kWideNonzero = 5;

void require_rows(Index n) {
    if (n < 1) throw DimensionError("simulation: n must be positive, got " + std::to_string(n));
}

void require_group_multiple(Index p) {
    if (p < kGroupSize || p % kGroupSize != 0) {
        throw DimensionError("simulation: p must be a positive multiple of 5, got " +
                             std::to_string(p));
    }
}

Vector add_response(const Matrix& x, const Vector& beta_star, RngStream& rng,
                    const SimOptions& options) {
    Vector y = x * beta_star;
    if (options.add_noise) y += sample_std_normal_vector(x.rows(), rng);
    return y;
}

/// Powers 1..5 of K standard normal base variables; the first `nonzero`
/// coefficients are t_2 draws.
SimulatedDataset grouped_polynomial(Index n, Index num_groups, Index nonzero, RngStream& rng,
                                    const SimOptions& options) {
    require_rows(n);
    if (num_groups < 1) {
        throw DimensionError("simulation: number of groups must be positive, got " +
                             std::to_string(num_groups));
    }
    const Index p = kGroupSize * num_groups;
    Matrix x(n, p);
    for (Index k = 0; k < num_groups; ++k) {
        for (Index i = 0; i < n; ++i) {
            const double z = sample_std_normal(rng);
            double power = 1.0;
            for (Index d = 0; d < kGroupSize; ++d) {
                power *= z;
                x(i, kGroupSize * k + d) = power;
            }
        }
    }
    Vector beta_star = Vector::Zero(p);
    for (Index j = 0; j < std::min(nonzero, p); ++j) beta_star[j] = sample_student_t(2.0, rng);

    Vector y = add_response(x, beta_star, rng, options);
    return SimulatedDataset{Dataset(std::move(y), std::move(x)), std::move(beta_star),
                            GroupStructure::uniform(num_groups, kGroupSize)};
}

}  // namespace

std::string_view to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::GroupedPoly: return "s1";
        case Scenario::AdjacentSimilar: return "s2";
        case Scenario::ExtraWide: return "wide";
        case Scenario::ExtraTall: return "tall";
    }
    return "unknown";
}

Scenario parse_scenario(std::string_view name) {
    if (name == "s1") return Scenario::GroupedPoly;
    if (name == "s2") return Scenario::AdjacentSimilar;
    if (name == "wide") return Scenario::ExtraWide;
    if (name == "tall") return Scenario::ExtraTall;
    throw DomainError("unknown scenario '" + std::string(name) + "' (expected s1, s2, wide or tall)");
}

void ScenarioSpec::validate() const {
    require_rows(n);
    if (scenario == Scenario::AdjacentSimilar) {
        if (p < 10 || p % 10 != 0) {
            throw DimensionError("scenario s2: p must be a positive multiple of 10, got " +
                                 std::to_string(p));
        }
        if (n < 2) throw DimensionError("scenario s2: n must be at least 2 to standardize");
    } else {
        require_group_multiple(p);
    }
}

SimulatedDataset gen_scenario1(Index n, Index num_groups, RngStream& rng,
                               const SimOptions& options) {
    return grouped_polynomial(n, num_groups, num_groups, rng, options);
}

SimulatedDataset gen_scenario2(Index n, Index p, RngStream& rng, const SimOptions& options) {
    ScenarioSpec{Scenario::AdjacentSimilar, n, p, 0}.validate();
    Matrix x = standardize_columns(equicorrelated_design(n, p, 0.2, rng));
    const Index block = p / 10;
    Vector beta_star = Vector::Zero(p);
    for (Index j = 0; j < block; ++j) beta_star[j] = sample_normal(1.0, 0.1, rng);
    for (Index j = 2 * block; j < 3 * block; ++j) beta_star[j] = sample_normal(1.0, 0.1, rng);

    Vector y = add_response(x, beta_star, rng, options);
    return SimulatedDataset{Dataset(std::move(y), std::move(x)), std::move(beta_star), std::nullopt};
}

SimulatedDataset gen_extra_wide(Index n, Index p, RngStream& rng, const SimOptions& options) {
    require_group_multiple(p);
    return grouped_polynomial(n, p / kGroupSize, kWideNonzero, rng, options);
}

SimulatedDataset gen_extra_tall(Index n, Index p, RngStream& rng, const SimOptions& options) {
    require_group_multiple(p);
    return grouped_polynomial(n, p / kGroupSize, kWideNonzero, rng, options);
}

SimulatedDataset generate(const ScenarioSpec& spec, const SimOptions& options) {
    spec.validate();
    RngStream rng(spec.seed);
    switch (spec.scenario) {
        case Scenario::GroupedPoly: return gen_scenario1(spec.n, spec.p / kGroupSize, rng, options);
        case Scenario::AdjacentSimilar: return gen_scenario2(spec.n, spec.p, rng, options);
        case Scenario::ExtraWide: return gen_extra_wide(spec.n, spec.p, rng, options);
        case Scenario::ExtraTall: return gen_extra_tall(spec.n, spec.p, rng, options);
    }
    throw DomainError("unknown scenario");
}

Matrix equicorrelated_design(Index n, Index p, double rho, RngStream& rng) {
    if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("equicorrelation must lie in [0, 1)");
    const double common = std::sqrt(rho);
    const double own = std::sqrt(1.0 - rho);
    Matrix x(n, p);
    for (Index i = 0; i < n; ++i) {
        const double z0 = sample_std_normal(rng);
        for (Index j = 0; j < p; ++j) x(i, j) = common * z0 + own * sample_std_normal(rng);
    }
    return x;
}

Matrix standardize_columns(const Matrix& x) {
    const Index n = x.rows();
    Matrix out(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        const auto col = x.col(j);
        if (n < 2 || col.minCoeff() == col.maxCoeff()) {
            throw DomainError("standardize: column " + std::to_string(j + 1) + " is constant");
        }
        Vector c = col.array() - col.mean();
        c *= std::sqrt(static_cast<double>(n) / c.squaredNorm());
        out.col(j) = c;
    }
    return out;
}

}  // namespace shrinkmc
