#include "shrinkmc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <thread>
#include <tuple>

#include "shrinkmc/diagnostics.hpp"
#include "shrinkmc/error.hpp"
#include "shrinkmc/io.hpp"

namespace shrinkmc {

namespace {

constexpr std::uint64_t kDataRole = 0;

std::uint64_t kernel_role(KernelKind kernel) {
    return kernel == KernelKind::TwoBlock ? 1 : 2;
}

std::string sanitize(std::string text) {
    for (char& c : text) {
        if (c == ',' ) c = ';';
        if (c == '\n' || c == '\r' || c == '"') c = ' ';
    }
    return text;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe out;
    if (v.empty()) return out;
    const double n = static_cast<double>(v.size());
    for (double x : v) out.mean += x;
    out.mean /= n;
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return out;
}

/// All kernels of one (cell, replication): one dataset, one row per kernel.
std::vector<BenchRow> run_replication(const BenchGrid& grid, std::size_t cell_index,
                                      long replication) {
    const BenchCell& cell = grid.cells[cell_index];
    std::vector<BenchRow> rows;
    rows.reserve(grid.kernels.size());
    for (KernelKind kernel : grid.kernels) {
        BenchRow row;
        row.model = grid.model;
        row.kernel = kernel;
        row.n = cell.n;
        row.p = cell.p;
        row.replication = replication;
        row.seed = bench_chain_seed(grid.master_seed, cell_index, replication, kernel);
        rows.push_back(row);
    }

    std::unique_ptr<Problem> problem;
    try {
        const ScenarioSpec scenario{grid.scenario, cell.n, cell.p,
                                    bench_data_seed(grid.master_seed, cell_index, replication)};
        SimulatedDataset sim = generate(scenario);
        ModelSpec spec = bench_model_spec(grid, sim);
        problem = std::make_unique<Problem>(std::move(sim.dataset), std::move(spec));
    } catch (const std::exception& e) {
        for (auto& row : rows) row.error = sanitize(std::string("setup: ") + e.what());
        return rows;
    }

    for (auto& row : rows) {
        try {
            RunConfig config;
            config.n_iter = grid.n_iter;
            config.burn_in = grid.burn_in;
            config.thin = grid.thin;
            config.seed = row.seed;
            const ChainOutput out = run_chain(row.kernel, *problem, config);
            const DiagnosticsReport report = diagnose(out.sigma2_draws, out.wall_time_seconds);
            row.rho1 = report.rho1;
            row.ess = report.ess;
            row.wall_time_seconds = out.wall_time_seconds;
            row.ess_per_second = report.ess_per_second;
        } catch (const std::exception& e) {
            row.error = sanitize(e.what());
        }
    }
    return rows;
}

}  // namespace

void BenchGrid::validate() const {
    if (replications < 1) throw DomainError("bench: replications must be >= 1");
    if (kernels.empty()) throw DomainError("bench: at least one kernel is required");
    if (cells.empty()) throw DomainError("bench: at least one (n, p) cell is required");
    if (jobs < 1) throw DomainError("bench: jobs must be >= 1");
    RunConfig config;
    config.n_iter = n_iter;
    config.burn_in = burn_in;
    config.thin = thin;
    config.validate();
    if (config.stored_draws() < 100) {
        throw DomainError("bench: at least 100 stored draws are needed for ESS, got " +
                          std::to_string(config.stored_draws()));
    }
    for (const BenchCell& cell : cells) {
        ScenarioSpec{scenario, cell.n, cell.p, 0}.validate();
    }
    if (model != ModelKind::FusedLasso && scenario == Scenario::AdjacentSimilar) {
        throw DomainError(std::string("bench: ") + std::string(to_string(model)) +
                          " needs a grouped scenario (s1, wide or tall)");
    }
}

std::uint64_t bench_data_seed(std::uint64_t master, std::size_t cell, long replication) {
    return derive_seed(master, {cell, static_cast<std::uint64_t>(replication), kDataRole});
}

std::uint64_t bench_chain_seed(std::uint64_t master, std::size_t cell, long replication,
                               KernelKind kernel) {
    return derive_seed(master,
                       {cell, static_cast<std::uint64_t>(replication), kernel_role(kernel)});
}

ModelSpec bench_model_spec(const BenchGrid& grid, const SimulatedDataset& sim) {
    switch (grid.model) {
        case ModelKind::GroupLasso:
            if (!sim.groups) throw DomainError("group-lasso needs grouped data");
            return ModelSpec::group_lasso(*sim.groups, grid.lambda, grid.alpha, grid.xi);
        case ModelKind::SparseGroupLasso:
            if (!sim.groups) throw DomainError("sparse-group-lasso needs grouped data");
            return ModelSpec::sparse_group_lasso(*sim.groups, grid.lambda1, grid.lambda2,
                                                 grid.alpha, grid.xi);
        case ModelKind::FusedLasso:
            return ModelSpec::fused_lasso(grid.lambda1, grid.lambda2, grid.alpha, grid.xi);
    }
    throw DomainError("unknown model kind");
}

std::vector<BenchRow> run_bench(const BenchGrid& grid) {
    grid.validate();
    struct Task {
        std::size_t cell;
        long replication;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        for (long r = 0; r < grid.replications; ++r) tasks.push_back({c, r});
    }

    std::vector<std::vector<BenchRow>> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
            results[i] = run_replication(grid, tasks[i].cell, tasks[i].replication);
        }
    };
    const unsigned threads =
        std::max(1u, std::min<unsigned>(grid.jobs, static_cast<unsigned>(tasks.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<BenchRow> rows;
    rows.reserve(tasks.size() * grid.kernels.size());
    for (auto& chunk : results) {
        for (auto& row : chunk) rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<BenchAggregate> aggregate(std::span<const BenchRow> rows) {
    using Key = std::tuple<ModelKind, KernelKind, Index, Index>;
    std::vector<Key> order;
    std::map<Key, std::vector<const BenchRow*>> groups;
    for (const BenchRow& row : rows) {
        const Key key{row.model, row.kernel, row.n, row.p};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(&row);
    }

    std::vector<BenchAggregate> out;
    out.reserve(order.size());
    for (const Key& key : order) {
        BenchAggregate agg;
        std::tie(agg.model, agg.kernel, agg.n, agg.p) = key;
        std::vector<double> rho1, log_eps, eps;
        for (const BenchRow* row : groups[key]) {
            if (!row->ok()) {
                ++agg.failures;
                continue;
            }
            rho1.push_back(row->rho1);
            eps.push_back(row->ess_per_second);
            log_eps.push_back(std::log10(row->ess_per_second));
        }
        agg.count = static_cast<long>(rho1.size());
        const MeanSe r = mean_se(rho1);
        const MeanSe l = mean_se(log_eps);
        agg.mean_rho1 = r.mean;
        agg.se_rho1 = r.se;
        agg.mean_log10_ess_per_second = l.mean;
        agg.se_log10_ess_per_second = l.se;
        agg.mean_ess_per_second = mean_se(eps).mean;
        out.push_back(agg);
    }
    return out;
}

void write_bench_rows(std::ostream& out, std::span<const BenchRow> rows, bool include_timing) {
    out << "model,kernel,n,p,replication,rho1,ess,wall_time_seconds,ess_per_second,seed,error\n";
    for (const BenchRow& row : rows) {
        out << to_string(row.model) << ',' << to_string(row.kernel) << ',' << row.n << ','
            << row.p << ',' << row.replication << ',';
        if (row.ok()) {
            out << format_double(row.rho1, 17) << ',' << format_double(row.ess, 17) << ',';
            if (include_timing) {
                out << format_double(row.wall_time_seconds, 17) << ','
                    << format_double(row.ess_per_second, 17);
            } else {
                out << "NA,NA";
            }
        } else {
            out << "NA,NA,NA,NA";
        }
        out << ',' << row.seed << ',' << row.error << '\n';
    }
}

void write_aggregate(std::ostream& out, std::span<const BenchAggregate> cells, bool include_timing) {
    const auto timed = [&](double v) { return include_timing ? format_double(v, 4) : std::string("NA"); };
    out << "model,kernel,n,p,replications,failures,mean_rho1,se_rho1,"
           "mean_log10_ess_per_second,se_log10_ess_per_second,mean_ess_per_second\n";
    for (const BenchAggregate& a : cells) {
        out << to_string(a.model) << ',' << to_string(a.kernel) << ',' << a.n << ',' << a.p << ','
            << a.count << ',' << a.failures << ',' << format_double(a.mean_rho1, 4) << ','
            << format_double(a.se_rho1, 4) << ',' << timed(a.mean_log10_ess_per_second) << ','
            << timed(a.se_log10_ess_per_second) << ',' << timed(a.mean_ess_per_second) << '\n';
    }
}

}  // namespace shrinkmc
