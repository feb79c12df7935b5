#pragma once

// Synthetic regression datasets: Y = X beta* + eps, eps ~ N(0, I).

#include <cstdint>
#include <optional>
#include <string_view>

#include "shrinkmc/model.hpp"
#include "shrinkmc/rng.hpp"

namespace shrinkmc {

enum class Scenario {
    GroupedPoly,      // raw polynomial groups, first p/5 coefficients t_2
    AdjacentSimilar,  // equicorrelated, standardized; blocks 1 and 3 ~ N(1, 0.1^2)
    ExtraWide,        // grouped polynomials, only the first 5 coefficients t_2
    ExtraTall,        // same mechanics as ExtraWide, p small relative to n
};

/// "s1", "s2", "wide", "tall"
std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view name);

struct ScenarioSpec {
    Scenario scenario = Scenario::GroupedPoly;
    Index n = 50;
    Index p = 25;
    std::uint64_t seed = 0;

    /// GroupedPoly / ExtraWide / ExtraTall need p = 5K; AdjacentSimilar needs
    /// p divisible by 10.
    void validate() const;
};

struct SimulatedDataset {
    Dataset dataset;
    Vector beta_star;
    std::optional<GroupStructure> groups;
};

struct SimOptions {
    /// Test hook: when false, Y = X beta* exactly.
    bool add_noise = true;
};

/// K standard normal base variables per row; columns are their powers 1..5,
/// grouped consecutively, p = 5K. Not standardized.
SimulatedDataset gen_scenario1(Index n, Index num_groups, RngStream& rng,
                               const SimOptions& options = {});

/// Rows ~ N_p(0, R) with R = 0.8 I + 0.2 11^T, columns standardized.
SimulatedDataset gen_scenario2(Index n, Index p, RngStream& rng, const SimOptions& options = {});

SimulatedDataset gen_extra_wide(Index n, Index p, RngStream& rng, const SimOptions& options = {});
SimulatedDataset gen_extra_tall(Index n, Index p, RngStream& rng, const SimOptions& options = {});

/// Dispatches on spec.scenario using RngStream(spec.seed).
SimulatedDataset generate(const ScenarioSpec& spec, const SimOptions& options = {});

/// n x p design with rows N_p(0, (1 - rho) I + rho 11^T), generated through
/// the one-factor form sqrt(rho) z_0 + sqrt(1 - rho) z_j.
Matrix equicorrelated_design(Index n, Index p, double rho, RngStream& rng);

/// Centers each column and rescales it to squared norm n. Throws DomainError
/// for a constant column.
Matrix standardize_columns(const Matrix& x);

}  // namespace shrinkmc
