#pragma once

// Replicated benchmark grids: for each (n, p) cell and replication, simulate
// one dataset and run every requested kernel on it. Row order is fixed by
// (cell, replication, kernel) and independent of thread scheduling.

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "shrinkmc/model.hpp"
#include "shrinkmc/samplers.hpp"
#include "shrinkmc/simgen.hpp"

namespace shrinkmc {

struct BenchCell {
    Index n = 0;
    Index p = 0;
};

struct BenchGrid {
    ModelKind model = ModelKind::GroupLasso;
    std::vector<KernelKind> kernels{KernelKind::TwoBlock, KernelKind::ThreeBlock};
    Scenario scenario = Scenario::GroupedPoly;
    std::vector<BenchCell> cells;
    long replications = 1;
    long n_iter = 10000;
    long burn_in = 1000;
    long thin = 1;
    double alpha = 0.0;
    double xi = 0.0;
    double lambda = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    std::uint64_t master_seed = 0;
    unsigned jobs = 1;

    void validate() const;
};

struct BenchRow {
    ModelKind model = ModelKind::GroupLasso;
    KernelKind kernel = KernelKind::TwoBlock;
    Index n = 0;
    Index p = 0;
    long replication = 0;
    double rho1 = 0.0;
    double ess = 0.0;
    double wall_time_seconds = 0.0;
    double ess_per_second = 0.0;
    std::uint64_t seed = 0;
    /// Empty on success; otherwise the failure message and the numeric
    /// fields are meaningless.
    std::string error;

    bool ok() const { return error.empty(); }
};

/// Seed of the dataset for (cell, replication).
std::uint64_t bench_data_seed(std::uint64_t master, std::size_t cell, long replication);
/// Seed of the chain for (cell, replication, kernel).
std::uint64_t bench_chain_seed(std::uint64_t master, std::size_t cell, long replication,
                               KernelKind kernel);

/// Model spec for a simulated dataset under the grid's hyperparameters.
ModelSpec bench_model_spec(const BenchGrid& grid, const SimulatedDataset& sim);

std::vector<BenchRow> run_bench(const BenchGrid& grid);

struct BenchAggregate {
    ModelKind model = ModelKind::GroupLasso;
    KernelKind kernel = KernelKind::TwoBlock;
    Index n = 0;
    Index p = 0;
    long count = 0;
    long failures = 0;
    double mean_rho1 = 0.0;
    double se_rho1 = 0.0;
    double mean_log10_ess_per_second = 0.0;
    double se_log10_ess_per_second = 0.0;
    double mean_ess_per_second = 0.0;
};

/// Groups successful rows by (model, kernel, n, p) in first-seen order.
/// Standard errors are sd / sqrt(count), and 0 when count == 1.
std::vector<BenchAggregate> aggregate(std::span<const BenchRow> rows);

/// Raw rows, 17 significant digits. With `include_timing` false the
/// wall_time_seconds and ess_per_second cells are written as NA, which makes
/// the file a pure function of the command line.
void write_bench_rows(std::ostream& out, std::span<const BenchRow> rows, bool include_timing);
/// Timing-derived columns are NA when `include_timing` is false.
void write_aggregate(std::ostream& out, std::span<const BenchAggregate> cells,
                     bool include_timing = true);

}  // namespace shrinkmc
