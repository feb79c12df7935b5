#include "shrinkmc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "shrinkmc/bench.hpp"
#include "shrinkmc/diagnostics.hpp"
#include "shrinkmc/error.hpp"
#include "shrinkmc/io.hpp"
#include "shrinkmc/samplers.hpp"
#include "shrinkmc/simgen.hpp"

namespace shrinkmc::cli {

namespace {

constexpr long kLongRunIterations = 100000;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot open '" + path + "' for writing");
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw Error("failed writing '" + path + "'");
}

/// --n/--K/--p selection shared by run, bench and simulate.
struct DesignSize {
    std::string scenario = "s1";
    long n = 0;
    long groups = 0;
    long p = 0;
};

Index resolve_p(Scenario scenario, long groups, long p) {
    if (groups > 0 && p > 0) throw DomainError("give either --K or --p, not both");
    if (groups > 0) {
        if (scenario == Scenario::AdjacentSimilar) {
            throw DomainError("scenario s2 has no groups; use --p");
        }
        return static_cast<Index>(5 * groups);
    }
    if (p > 0) return static_cast<Index>(p);
    throw DomainError("a design width is required (--K or --p)");
}

struct Hyper {
    std::optional<double> lambda;
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    double alpha = 0.0;
    double xi = 0.0;
};

ModelSpec make_spec(ModelKind kind, const Hyper& h, const std::optional<GroupStructure>& groups) {
    switch (kind) {
        case ModelKind::GroupLasso:
            if (!h.lambda) throw DomainError("group-lasso requires --lambda");
            if (!groups) throw DomainError("group-lasso requires a group structure (--groups)");
            return ModelSpec::group_lasso(*groups, *h.lambda, h.alpha, h.xi);
        case ModelKind::SparseGroupLasso:
            if (!h.lambda1 || !h.lambda2) {
                throw DomainError("sparse-group-lasso requires --lambda1 and --lambda2");
            }
            if (!groups) {
                throw DomainError("sparse-group-lasso requires a group structure (--groups)");
            }
            return ModelSpec::sparse_group_lasso(*groups, *h.lambda1, *h.lambda2, h.alpha, h.xi);
        case ModelKind::FusedLasso:
            if (!h.lambda1 || !h.lambda2) {
                throw DomainError("fused-lasso requires --lambda1 and --lambda2");
            }
            return ModelSpec::fused_lasso(*h.lambda1, *h.lambda2, h.alpha, h.xi);
    }
    throw DomainError("unknown model kind");
}

void add_hyper_options(CLI::App& cmd, Hyper& h) {
    cmd.add_option("--lambda", h.lambda, "Group lasso penalty");
    cmd.add_option("--lambda1", h.lambda1, "First penalty (sparse group, fused)");
    cmd.add_option("--lambda2", h.lambda2, "Second penalty (sparse group, fused)");
    cmd.add_option("--alpha", h.alpha, "Inverse-gamma shape of the sigma^2 prior")
        ->capture_default_str();
    cmd.add_option("--xi", h.xi, "Inverse-gamma scale of the sigma^2 prior")
        ->capture_default_str();
}

// ---------------------------------------------------------------- run

struct RunArgs {
    std::string model;
    std::string kernel = "2bg";
    DesignSize size;
    bool scenario_given = false;
    std::string data;
    std::size_t response_col = 1;
    std::string groups;
    std::string groups_file;
    Hyper hyper;
    long iters = 10000;
    long burnin = 1000;
    long thin = 1;
    bool long_run = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string draws;
    bool store_beta = false;
};

std::string read_groups_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open groups file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    std::replace(text.begin(), text.end(), '\n', ',');
    while (!text.empty() && (text.back() == ',' || text.back() == '\r' || text.back() == ' ')) {
        text.pop_back();
    }
    return text;
}

void write_draws(const std::string& path, const ChainOutput& chain, const RunConfig& config) {
    std::ofstream out = open_output(path);
    out << "iteration,sigma2";
    const bool with_beta = chain.beta_draws.rows() > 0;
    if (with_beta) {
        for (Index j = 0; j < chain.p; ++j) out << ",beta" << (j + 1);
    }
    out << '\n';
    for (std::size_t k = 0; k < chain.sigma2_draws.size(); ++k) {
        const long iteration = config.burn_in + static_cast<long>(k + 1) * config.thin;
        out << iteration << ',' << format_double(chain.sigma2_draws[k], 17);
        if (with_beta) {
            for (Index j = 0; j < chain.p; ++j) {
                out << ',' << format_double(chain.beta_draws(static_cast<Index>(k), j), 17);
            }
        }
        out << '\n';
    }
    finish_output(out, path);
}

int cmd_run(const RunArgs& a, std::ostream& out) {
    const ModelKind model = parse_model_kind(a.model);
    const KernelKind kernel = parse_kernel_kind(a.kernel);

    std::optional<Dataset> data;
    std::optional<GroupStructure> groups;
    if (a.data.empty()) {
        const Scenario scenario = parse_scenario(a.size.scenario);
        const ScenarioSpec spec{scenario, static_cast<Index>(a.size.n),
                                resolve_p(scenario, a.size.groups, a.size.p),
                                derive_seed(a.seed, {0})};
        SimulatedDataset sim = generate(spec);
        data.emplace(std::move(sim.dataset));
        groups = std::move(sim.groups);
    } else {
        if (a.response_col < 1) throw DomainError("--response-col is 1-based");
        CsvOptions options;
        options.response_column = a.response_col - 1;
        if (!a.groups.empty() && !a.groups_file.empty()) {
            throw DomainError("give either --groups or --groups-file, not both");
        }
        if (!a.groups.empty()) options.group_sizes = parse_group_sizes(a.groups);
        if (!a.groups_file.empty()) {
            options.group_sizes = parse_group_sizes(read_groups_file(a.groups_file));
        }
        LoadedDataset loaded = read_dataset_csv(a.data, options);
        data.emplace(std::move(loaded.dataset));
        groups = std::move(loaded.groups);
    }

    const Problem problem(std::move(*data), make_spec(model, a.hyper, groups));

    RunConfig config;
    config.n_iter = a.long_run ? kLongRunIterations : a.iters;
    config.burn_in = a.burnin;
    config.thin = a.thin;
    config.seed = derive_seed(a.seed, {1});
    config.store_beta = a.store_beta;
    config.validate();

    const ChainOutput chain = run_chain(kernel, problem, config);
    const DiagnosticsReport report = diagnose(chain.sigma2_draws, chain.wall_time_seconds);

    nlohmann::ordered_json j;
    j["model"] = std::string(to_string(model));
    j["kernel"] = std::string(to_string(kernel));
    j["n"] = chain.n;
    j["p"] = chain.p;
    j["seed"] = a.seed;
    j["iters"] = config.n_iter;
    j["burnin"] = config.burn_in;
    j["rho1"] = report.rho1;
    j["ess"] = report.ess;
    j["wall_time_seconds"] = chain.wall_time_seconds;
    j["ess_per_second"] = report.ess_per_second;
    j["sigma2_mean"] = report.summary.mean;
    j["sigma2_q025"] = report.summary.q025;
    j["sigma2_q975"] = report.summary.q975;

    if (!a.draws.empty()) write_draws(a.draws, chain, config);
    if (a.out.empty()) {
        out << j.dump(2) << '\n';
    } else {
        std::ofstream file = open_output(a.out);
        file << j.dump(2) << '\n';
        finish_output(file, a.out);
    }
    return kExitOk;
}

// -------------------------------------------------------------- bench

struct BenchArgs {
    std::string model;
    std::vector<std::string> kernels{"2bg", "3bg"};
    std::string scenario = "s1";
    std::vector<long> ns;
    std::vector<long> ks;
    std::vector<long> ps;
    long reps = 1;
    long iters = 10000;
    long burnin = 1000;
    long thin = 1;
    bool long_run = false;
    Hyper hyper;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::string out;
    std::string aggregate_out;
    std::string timing = "wall";
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    BenchGrid grid;
    grid.model = parse_model_kind(a.model);
    grid.kernels.clear();
    for (const auto& k : a.kernels) grid.kernels.push_back(parse_kernel_kind(k));
    grid.scenario = parse_scenario(a.scenario);
    if (!a.ks.empty() && !a.ps.empty()) throw DomainError("give either --K or --p, not both");
    if (a.ks.empty() && a.ps.empty()) throw DomainError("a design width is required (--K or --p)");
    for (long n : a.ns) {
        for (long k : a.ks) grid.cells.push_back({n, resolve_p(grid.scenario, k, 0)});
        for (long p : a.ps) grid.cells.push_back({n, resolve_p(grid.scenario, 0, p)});
    }
    grid.replications = a.reps;
    grid.n_iter = a.long_run ? kLongRunIterations : a.iters;
    grid.burn_in = a.burnin;
    grid.thin = a.thin;
    grid.alpha = a.hyper.alpha;
    grid.xi = a.hyper.xi;
    grid.lambda = a.hyper.lambda.value_or(1.0);
    grid.lambda1 = a.hyper.lambda1.value_or(1.0);
    grid.lambda2 = a.hyper.lambda2.value_or(1.0);
    grid.master_seed = a.seed;
    grid.jobs = a.jobs;
    grid.validate();
    const bool timing = a.timing == "wall";

    const std::vector<BenchRow> rows = run_bench(grid);
    {
        std::ofstream file = open_output(a.out);
        write_bench_rows(file, rows, timing);
        finish_output(file, a.out);
    }
    const std::string agg_path = a.aggregate_out.empty() ? a.out + ".aggregate.csv" : a.aggregate_out;
    {
        std::ofstream file = open_output(agg_path);
        write_aggregate(file, aggregate(rows), timing);
        finish_output(file, agg_path);
    }

    const auto failures = std::count_if(rows.begin(), rows.end(),
                                        [](const BenchRow& r) { return !r.ok(); });
    out << "wrote " << rows.size() << " rows to " << a.out << " (" << failures
        << " failed), aggregate in " << agg_path << '\n';
    return kExitOk;
}

// ----------------------------------------------------------- simulate

struct SimulateArgs {
    DesignSize size;
    std::uint64_t seed = 0;
    std::string out;
    std::string groups_out;
    std::string beta_out;
    bool no_noise = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const Scenario scenario = parse_scenario(a.size.scenario);
    const ScenarioSpec spec{scenario, static_cast<Index>(a.size.n),
                            resolve_p(scenario, a.size.groups, a.size.p), a.seed};
    SimOptions options;
    options.add_noise = !a.no_noise;
    const SimulatedDataset sim = generate(spec, options);

    {
        std::ofstream file = open_output(a.out);
        write_dataset_csv(file, sim.dataset);
        finish_output(file, a.out);
    }
    if (sim.groups) {
        const std::string path = a.groups_out.empty() ? a.out + ".groups" : a.groups_out;
        std::ofstream file = open_output(path);
        file << format_group_sizes(*sim.groups) << '\n';
        finish_output(file, path);
    }
    if (!a.beta_out.empty()) {
        std::ofstream file = open_output(a.beta_out);
        file << "beta\n";
        for (Index j = 0; j < sim.beta_star.size(); ++j) {
            file << format_double(sim.beta_star[j], 17) << '\n';
        }
        finish_output(file, a.beta_out);
    }
    out << "wrote n=" << sim.dataset.n() << " p=" << sim.dataset.p() << " to " << a.out << '\n';
    return kExitOk;
}

void add_size_options(CLI::App& cmd, DesignSize& size) {
    cmd.add_option("--n", size.n, "Number of observations")->required()->check(CLI::PositiveNumber);
    cmd.add_option("--K", size.groups, "Number of size-5 groups (p = 5K)")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--p", size.p, "Number of covariates")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two- and three-block Gibbs samplers for Bayesian group, sparse group and "
                 "fused lasso regression.",
                 "shrinkmc"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run_cmd = app.add_subcommand("run", "Run one chain and write a JSON diagnostics report");
    run_cmd->add_option("--model", run_args.model, "group-lasso | sparse-group-lasso | fused-lasso")
        ->required();
    run_cmd->add_option("--kernel", run_args.kernel, "2bg | 3bg")->capture_default_str();
    auto* scen = run_cmd->add_option("--scenario", run_args.size.scenario, "s1 | s2 | wide | tall");
    run_cmd->add_option("--n", run_args.size.n, "Observations (simulated data)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--K", run_args.size.groups, "Groups of five (simulated data, p = 5K)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--p", run_args.size.p, "Covariates (simulated data)")
        ->check(CLI::PositiveNumber);
    auto* data = run_cmd->add_option("--data", run_args.data, "Dataset CSV (response first)");
    data->excludes(scen);
    run_cmd->add_option("--response-col", run_args.response_col, "1-based response column")
        ->capture_default_str();
    run_cmd->add_option("--groups", run_args.groups, "Group sizes, e.g. 5,5,5");
    run_cmd->add_option("--groups-file", run_args.groups_file, "File holding group sizes");
    add_hyper_options(*run_cmd, run_args.hyper);
    auto* iters = run_cmd->add_option("--iters", run_args.iters, "Total iterations")
                      ->capture_default_str();
    run_cmd->add_option("--burnin", run_args.burnin, "Burn-in iterations")->capture_default_str();
    run_cmd->add_option("--thin", run_args.thin, "Keep every k-th draw")->capture_default_str();
    run_cmd->add_flag("--long-run", run_args.long_run, "Use 100000 iterations")->excludes(iters);
    run_cmd->add_option("--seed", run_args.seed, "Master seed")->capture_default_str();
    run_cmd->add_option("--out", run_args.out, "Report path (default: stdout)");
    run_cmd->add_option("--draws", run_args.draws, "Write stored draws to this CSV");
    run_cmd->add_flag("--store-beta", run_args.store_beta, "Include beta draws in --draws");

    BenchArgs bench_args;
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "Replicated kernel comparison over an (n, p) grid");
    bench_cmd->add_option("--model", bench_args.model, "group-lasso | sparse-group-lasso | fused-lasso")
        ->required();
    bench_cmd->add_option("--kernels", bench_args.kernels, "Comma-separated kernels")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--scenario", bench_args.scenario, "s1 | s2 | wide | tall")
        ->capture_default_str();
    bench_cmd->add_option("--n", bench_args.ns, "Comma-separated n values")
        ->delimiter(',')
        ->required();
    bench_cmd->add_option("--K", bench_args.ks, "Comma-separated group counts (p = 5K)")
        ->delimiter(',');
    bench_cmd->add_option("--p", bench_args.ps, "Comma-separated p values")->delimiter(',');
    bench_cmd->add_option("--reps", bench_args.reps, "Replications per cell")->capture_default_str();
    auto* bench_iters = bench_cmd->add_option("--iters", bench_args.iters, "Iterations per chain")
                            ->capture_default_str();
    bench_cmd->add_option("--burnin", bench_args.burnin, "Burn-in iterations")->capture_default_str();
    bench_cmd->add_option("--thin", bench_args.thin, "Keep every k-th draw")->capture_default_str();
    bench_cmd->add_flag("--long-run", bench_args.long_run, "Use 100000 iterations")
        ->excludes(bench_iters);
    add_hyper_options(*bench_cmd, bench_args.hyper);
    bench_cmd->add_option("--seed", bench_args.seed, "Master seed")->capture_default_str();
    bench_cmd->add_option("--jobs", bench_args.jobs, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_cmd->add_option("--out", bench_args.out, "Raw rows CSV")->required();
    bench_cmd->add_option("--aggregate", bench_args.aggregate_out,
                          "Aggregate CSV (default: <out>.aggregate.csv)");
    bench_cmd->add_option("--timing", bench_args.timing, "wall | none (none writes NA timings)")
        ->check(CLI::IsMember({"wall", "none"}))
        ->capture_default_str();

    SimulateArgs sim_args;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Write a simulated dataset as CSV");
    sim_cmd->add_option("--scenario", sim_args.size.scenario, "s1 | s2 | wide | tall")
        ->capture_default_str();
    add_size_options(*sim_cmd, sim_args.size);
    sim_cmd->add_option("--seed", sim_args.seed, "Seed")->capture_default_str();
    sim_cmd->add_option("--out", sim_args.out, "Dataset CSV")->required();
    sim_cmd->add_option("--groups-out", sim_args.groups_out, "Group sizes file (default: <out>.groups)");
    sim_cmd->add_option("--beta-out", sim_args.beta_out, "True coefficients CSV");
    sim_cmd->add_flag("--no-noise", sim_args.no_noise, "Y = X beta exactly");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "run 'shrinkmc --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            if (run_args.data.empty() && run_args.size.n <= 0) {
                throw DomainError("run needs --data or a simulated design (--scenario, --n, --K/--p)");
            }
            return cmd_run(run_args, out);
        }
        if (bench_cmd->parsed()) return cmd_bench(bench_args, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim_args, out);
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace shrinkmc::cli
