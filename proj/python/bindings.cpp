#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "shrinkmc/bench.hpp"
#include "shrinkmc/diagnostics.hpp"
#include "shrinkmc/error.hpp"
#include "shrinkmc/model.hpp"
#include "shrinkmc/rng.hpp"
#include "shrinkmc/samplers.hpp"
#include "shrinkmc/simgen.hpp"

namespace py = pybind11;
using namespace shrinkmc;

namespace {

ModelSpec make_spec(const std::string& model, std::optional<std::vector<Index>> groups,
                    double lambda, double lambda1, double lambda2, double alpha, double xi) {
    ModelSpec spec;
    spec.kind = parse_model_kind(model);
    spec.lambda = lambda;
    spec.lambda1 = lambda1;
    spec.lambda2 = lambda2;
    spec.alpha = alpha;
    spec.xi = xi;
    if (groups) spec.groups = GroupStructure(std::move(*groups));
    return spec;
}

LatentScales make_scales(Vector tau2, std::optional<Vector> gamma2, std::optional<Vector> omega2) {
    LatentScales s;
    s.tau2 = std::move(tau2);
    if (gamma2) s.gamma2 = std::move(*gamma2);
    if (omega2) s.omega2 = std::move(*omega2);
    return s;
}

py::dict summary_dict(const Summary& s) {
    py::dict d;
    d["mean"] = s.mean;
    d["sd"] = s.sd;
    d["q025"] = s.q025;
    d["q50"] = s.q50;
    d["q975"] = s.q975;
    return d;
}

py::dict run_chain_py(const std::string& model, const std::string& kernel, const Vector& y,
                      const Matrix& x, std::optional<std::vector<Index>> groups, double lambda,
                      double lambda1, double lambda2, double alpha, double xi, long iters,
                      long burnin, long thin, std::uint64_t seed, bool store_beta) {
    const ModelSpec spec = make_spec(model, std::move(groups), lambda, lambda1, lambda2, alpha, xi);
    RunConfig config;
    config.n_iter = iters;
    config.burn_in = burnin;
    config.thin = thin;
    config.seed = seed;
    config.store_beta = store_beta;
    const KernelKind k = parse_kernel_kind(kernel);

    ChainOutput out;
    {
        py::gil_scoped_release release;
        out = run_chain(k, spec, Dataset(y, x), config);
    }
    py::dict d;
    d["sigma2"] = Vector(Eigen::Map<const Vector>(out.sigma2_draws.data(),
                                                  static_cast<Index>(out.sigma2_draws.size())));
    if (store_beta) d["beta"] = out.beta_draws;
    d["wall_time_seconds"] = out.wall_time_seconds;
    d["model"] = std::string(to_string(out.model));
    d["kernel"] = std::string(to_string(out.kernel));
    d["seed"] = out.seed;
    return d;
}

py::dict simulate_py(const std::string& scenario, Index n, Index p, std::uint64_t seed, bool noise) {
    const SimulatedDataset sim = generate({parse_scenario(scenario), n, p, seed}, SimOptions{noise});
    py::dict d;
    d["y"] = sim.dataset.y();
    d["X"] = sim.dataset.x();
    d["beta_star"] = sim.beta_star;
    if (sim.groups) {
        d["groups"] = sim.groups->sizes();
    } else {
        d["groups"] = py::none();
    }
    return d;
}

py::list bench_py(const std::string& model, const std::vector<std::string>& kernels,
                  const std::string& scenario, const std::vector<std::pair<Index, Index>>& cells,
                  long reps, long iters, long burnin, double lambda, double lambda1, double lambda2,
                  double alpha, double xi, std::uint64_t seed, unsigned jobs) {
    BenchGrid grid;
    grid.model = parse_model_kind(model);
    grid.kernels.clear();
    for (const auto& k : kernels) grid.kernels.push_back(parse_kernel_kind(k));
    grid.scenario = parse_scenario(scenario);
    for (const auto& [n, p] : cells) grid.cells.push_back({n, p});
    grid.replications = reps;
    grid.n_iter = iters;
    grid.burn_in = burnin;
    grid.lambda = lambda;
    grid.lambda1 = lambda1;
    grid.lambda2 = lambda2;
    grid.alpha = alpha;
    grid.xi = xi;
    grid.master_seed = seed;
    grid.jobs = jobs;
    grid.validate();

    std::vector<BenchRow> rows;
    {
        py::gil_scoped_release release;
        rows = run_bench(grid);
    }
    py::list out;
    for (const BenchRow& r : rows) {
        py::dict d;
        d["model"] = std::string(to_string(r.model));
        d["kernel"] = std::string(to_string(r.kernel));
        d["n"] = r.n;
        d["p"] = r.p;
        d["replication"] = r.replication;
        d["rho1"] = r.rho1;
        d["ess"] = r.ess;
        d["wall_time_seconds"] = r.wall_time_seconds;
        d["ess_per_second"] = r.ess_per_second;
        d["seed"] = r.seed;
        d["error"] = r.error;
        out.append(std::move(d));
    }
    return out;
}

template <class F>
Vector draws(std::size_t size, std::uint64_t seed, F f) {
    RngStream rng(seed);
    Vector v(static_cast<Index>(size));
    for (Index i = 0; i < v.size(); ++i) v[i] = f(rng);
    return v;
}

}  // namespace

PYBIND11_MODULE(_shrinkmc, m) {
    m.doc() = "Two- and three-block Gibbs samplers for Bayesian group, sparse group and fused lasso";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    m.def("run_chain", &run_chain_py, py::arg("model"), py::arg("kernel") = "2bg", py::arg("y"),
          py::arg("X"), py::arg("groups") = py::none(), py::arg("lam") = 1.0,
          py::arg("lambda1") = 1.0, py::arg("lambda2") = 1.0, py::arg("alpha") = 0.0,
          py::arg("xi") = 0.0, py::arg("iters") = 10000, py::arg("burnin") = 1000,
          py::arg("thin") = 1, py::arg("seed") = 0, py::arg("store_beta") = false,
          "Run one chain; returns a dict with sigma2 (and beta) draws and the wall time.");

    m.def("simulate", &simulate_py, py::arg("scenario"), py::arg("n"), py::arg("p"),
          py::arg("seed") = 0, py::arg("noise") = true,
          "Simulated dataset: dict with y, X, beta_star and groups (None for s2).");

    m.def("bench", &bench_py, py::arg("model"), py::arg("kernels") = std::vector<std::string>{"2bg", "3bg"},
          py::arg("scenario") = "s1", py::arg("cells"), py::arg("reps") = 1, py::arg("iters") = 10000,
          py::arg("burnin") = 1000, py::arg("lam") = 1.0, py::arg("lambda1") = 1.0,
          py::arg("lambda2") = 1.0, py::arg("alpha") = 0.0, py::arg("xi") = 0.0,
          py::arg("seed") = 0, py::arg("jobs") = 1,
          "Replicated kernel comparison; one dict per (cell, replication, kernel).");

    m.def("autocorr", [](std::vector<double> x, std::size_t lag) { return autocorr(x, lag); },
          py::arg("series"), py::arg("lag") = 1);
    m.def("ess", [](std::vector<double> x) { return ess_univariate(x); }, py::arg("series"));
    m.def("ess_per_second", &ess_per_second, py::arg("ess"), py::arg("wall_time_seconds"));
    m.def("summarize", [](std::vector<double> x) { return summary_dict(summarize(x)); },
          py::arg("series"));

    m.def("build_group_cov",
          [](Vector tau2, std::vector<Index> groups) {
              return build_group_cov(make_scales(std::move(tau2), {}, {}), GroupStructure(std::move(groups)));
          },
          py::arg("tau2"), py::arg("groups"));
    m.def("build_sparse_group_cov",
          [](Vector tau2, Vector gamma2, std::vector<Index> groups) {
              return build_sparse_group_cov(make_scales(std::move(tau2), std::move(gamma2), {}),
                                            GroupStructure(std::move(groups)));
          },
          py::arg("tau2"), py::arg("gamma2"), py::arg("groups"));
    m.def("build_fused_precision",
          [](Vector tau2, Vector omega2) {
              return build_fused_precision(make_scales(std::move(tau2), {}, std::move(omega2))).dense();
          },
          py::arg("tau2"), py::arg("omega2"));

    m.def("marginal_sigma2_params",
          [](const Vector& y, const Matrix& x, const Vector& prior_cov_diag, double alpha, double xi) {
              const auto p = marginal_sigma2_params(Dataset(y, x),
                                                    PriorPrecision::from_covariance_diagonal(prior_cov_diag),
                                                    alpha, xi);
              return std::make_pair(p.shape, p.scale);
          },
          py::arg("y"), py::arg("X"), py::arg("prior_cov_diag"), py::arg("alpha") = 0.0,
          py::arg("xi") = 0.0, "(shape, scale) of sigma^2 given the latent scales, beta integrated out.");
    m.def("conditional_sigma2_params",
          [](const Vector& y, const Matrix& x, const Vector& beta, const Vector& prior_cov_diag,
             double alpha, double xi) {
              const auto p = conditional_sigma2_params(
                  Dataset(y, x), beta, PriorPrecision::from_covariance_diagonal(prior_cov_diag), alpha, xi);
              return std::make_pair(p.shape, p.scale);
          },
          py::arg("y"), py::arg("X"), py::arg("beta"), py::arg("prior_cov_diag"),
          py::arg("alpha") = 0.0, py::arg("xi") = 0.0, "(shape, scale) of sigma^2 given beta.");

    m.def("sample_inverse_gaussian",
          [](double mu, double lam, std::size_t size, std::uint64_t seed) {
              return draws(size, seed, [&](RngStream& r) { return sample_inverse_gaussian(mu, lam, r); });
          },
          py::arg("mu"), py::arg("lam"), py::arg("size"), py::arg("seed") = 0);
    m.def("sample_inverse_gamma",
          [](double shape, double scale, std::size_t size, std::uint64_t seed) {
              return draws(size, seed, [&](RngStream& r) { return sample_inverse_gamma(shape, scale, r); });
          },
          py::arg("shape"), py::arg("scale"), py::arg("size"), py::arg("seed") = 0);
    m.def("sample_gamma",
          [](double shape, double rate, std::size_t size, std::uint64_t seed) {
              return draws(size, seed, [&](RngStream& r) { return sample_gamma(shape, rate, r); });
          },
          py::arg("shape"), py::arg("rate"), py::arg("size"), py::arg("seed") = 0);
    m.def("sample_mvn_precision",
          [](const Vector& b, const Matrix& precision, double sigma2, std::size_t size, std::uint64_t seed) {
              RngStream rng(seed);
              Matrix out(static_cast<Index>(size), b.size());
              for (Index i = 0; i < out.rows(); ++i) out.row(i) = sample_mvn_precision(b, precision, sigma2, rng);
              return out;
          },
          py::arg("b"), py::arg("precision"), py::arg("sigma2"), py::arg("size"), py::arg("seed") = 0);
}
