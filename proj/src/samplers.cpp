#include "shrinkmc/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "shrinkmc/error.hpp"

namespace shrinkmc {

namespace {

/// tau^2 such that 1/tau^2 | beta, sigma^2 ~ IG(sqrt(lambda^2 sigma^2 / sq_norm), lambda^2).
/// As sq_norm -> 0 the IG mean diverges and the conditional tends to
/// tau^2 ~ Gamma(1/2, rate lambda^2 / 2), which is drawn instead.
double draw_mixing_variance(double sq_norm, double lambda, double sigma2, RngStream& rng) {
    const double lambda2 = lambda * lambda;
    const double mu = mixing_ig_mean(sq_norm, lambda, sigma2);
    if (std::isfinite(mu)) return 1.0 / sample_inverse_gaussian(mu, lambda2, rng);
    return sample_gamma(0.5, 0.5 * lambda2, rng);
}

void require_kind(const Problem& problem, ModelKind expected) {
    if (problem.spec().kind != expected) {
        throw DomainError("kernel for " + std::string(to_string(expected)) + " called on a " +
                          std::string(to_string(problem.spec().kind)) + " model");
    }
}

double residual_sum_of_squares(const Problem& problem, const Vector& beta) {
    const Dataset& data = problem.data();
    if (problem.gram().identity_design) return (data.y() - beta).squaredNorm();
    return (data.y() - data.x() * beta).squaredNorm();
}

/// Draws (sigma^2, beta) given the latent scales. Shared by all six kernels;
/// the kernel only changes which sigma^2 conditional is used.
ChainState draw_coefficient_block(KernelKind kernel, const ChainState& incoming,
                                  LatentScales scales, const Problem& problem, RngStream& rng) {
    const Dataset& data = problem.data();
    const ModelSpec& spec = problem.spec();
    const PriorPrecision prior = prior_precision(spec, scales);
    const PosteriorFactor factor(problem.gram(), prior);

    const auto n = static_cast<double>(data.n());
    const auto p = static_cast<double>(data.p());
    double shape = 0.0;
    double scale = 0.0;
    if (kernel == KernelKind::TwoBlock) {
        shape = 0.5 * n + spec.alpha;
        scale = 0.5 * factor.residual_quadratic(data, prior) + spec.xi;
    } else {
        shape = 0.5 * (n + p) + spec.alpha;
        scale = 0.5 * (residual_sum_of_squares(problem, incoming.beta) +
                       prior.quadratic_form(incoming.beta)) +
                spec.xi;
    }
    if (!(scale > kScaleFloor) || !std::isfinite(scale)) {
        throw DomainError("sigma^2 scale parameter is degenerate (" + std::to_string(scale) + ")");
    }

    ChainState next;
    next.sigma2 = sample_inverse_gamma(shape, scale, rng);
    const Vector w = sample_std_normal_vector(data.p(), rng);
    next.beta = factor.mean() + std::sqrt(next.sigma2) * factor.solve_upper(w);
    next.scales = std::move(scales);
    return next;
}

ChainState generic_step(KernelKind kernel, ModelKind kind, const ChainState& state,
                        const Problem& problem, RngStream& rng, const StepOptions& options) {
    require_kind(problem, kind);
    LatentScales scales =
        options.freeze_latent ? state.scales : draw_latent_scales(state, problem, rng);
    return draw_coefficient_block(kernel, state, std::move(scales), problem, rng);
}

}  // namespace

std::string_view to_string(KernelKind kind) {
    return kind == KernelKind::TwoBlock ? "2bg" : "3bg";
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "2bg") return KernelKind::TwoBlock;
    if (name == "3bg") return KernelKind::ThreeBlock;
    throw DomainError("unknown kernel '" + std::string(name) + "' (expected 2bg or 3bg)");
}

double mixing_ig_mean(double sq_norm, double lambda, double sigma2) {
    if (!(sq_norm > 0.0)) return std::numeric_limits<double>::infinity();
    return std::sqrt(lambda * lambda * sigma2 / sq_norm);
}

Problem::Problem(Dataset data, ModelSpec spec)
    : data_(std::move(data)), spec_(std::move(spec)), gram_(data_) {
    spec_.validate(data_.p());
}

LatentScales draw_latent_scales(const ChainState& state, const Problem& problem, RngStream& rng) {
    const ModelSpec& spec = problem.spec();
    const Vector& beta = state.beta;
    const double sigma2 = state.sigma2;
    const Index p = problem.data().p();
    if (beta.size() != p) {
        throw DimensionError("beta: expected length " + std::to_string(p) + ", got " +
                             std::to_string(beta.size()));
    }

    LatentScales s;
    switch (spec.kind) {
        case ModelKind::GroupLasso: {
            const GroupStructure& g = *spec.groups;
            s.tau2.resize(g.num_groups());
            for (Index k = 0; k < g.num_groups(); ++k) {
                const double sq = beta.segment(g.offset(k), g.size(k)).squaredNorm();
                s.tau2[k] = draw_mixing_variance(sq, spec.lambda, sigma2, rng);
            }
            break;
        }
        case ModelKind::SparseGroupLasso: {
            const GroupStructure& g = *spec.groups;
            s.tau2.resize(g.num_groups());
            for (Index k = 0; k < g.num_groups(); ++k) {
                const double sq = beta.segment(g.offset(k), g.size(k)).squaredNorm();
                s.tau2[k] = draw_mixing_variance(sq, spec.lambda1, sigma2, rng);
            }
            s.gamma2.resize(p);
            for (Index j = 0; j < p; ++j) {
                s.gamma2[j] = draw_mixing_variance(beta[j] * beta[j], spec.lambda2, sigma2, rng);
            }
            break;
        }
        case ModelKind::FusedLasso: {
            s.tau2.resize(p);
            for (Index j = 0; j < p; ++j) {
                s.tau2[j] = draw_mixing_variance(beta[j] * beta[j], spec.lambda1, sigma2, rng);
            }
            s.omega2.resize(p - 1);
            for (Index j = 0; j + 1 < p; ++j) {
                const double d = beta[j + 1] - beta[j];
                s.omega2[j] = draw_mixing_variance(d * d, spec.lambda2, sigma2, rng);
            }
            break;
        }
    }
    return s;
}

ChainState step_2bg_group(const ChainState& state, const Problem& problem, RngStream& rng,
                          const StepOptions& options) {
    return generic_step(KernelKind::TwoBlock, ModelKind::GroupLasso, state, problem, rng, options);
}

ChainState step_3bg_group(const ChainState& state, const Problem& problem, RngStream& rng,
                          const StepOptions& options) {
    return generic_step(KernelKind::ThreeBlock, ModelKind::GroupLasso, state, problem, rng,
                        options);
}

ChainState step_2bg_sparse_group(const ChainState& state, const Problem& problem,
                                 RngStream& rng, const StepOptions& options) {
    return generic_step(KernelKind::TwoBlock, ModelKind::SparseGroupLasso, state, problem, rng,
                        options);
}

ChainState step_3bg_sparse_group(const ChainState& state, const Problem& problem,
                                 RngStream& rng, const StepOptions& options) {
    return generic_step(KernelKind::ThreeBlock, ModelKind::SparseGroupLasso, state, problem, rng,
                        options);
}

ChainState step_2bg_fused(const ChainState& state, const Problem& problem, RngStream& rng,
                          const StepOptions& options) {
    return generic_step(KernelKind::TwoBlock, ModelKind::FusedLasso, state, problem, rng, options);
}

ChainState step_3bg_fused(const ChainState& state, const Problem& problem, RngStream& rng,
                          const StepOptions& options) {
    return generic_step(KernelKind::ThreeBlock, ModelKind::FusedLasso, state, problem, rng,
                        options);
}

ChainState step(KernelKind kernel, const ChainState& state, const Problem& problem,
                RngStream& rng, const StepOptions& options) {
    return generic_step(kernel, problem.spec().kind, state, problem, rng, options);
}

ChainState initial_state(const Problem& problem) {
    const Dataset& data = problem.data();
    ChainState s;
    s.beta = Vector::Zero(data.p());
    s.sigma2 = 1.0;
    if (data.n() > 1) {
        const double mean = data.y().mean();
        const double var =
            (data.y().array() - mean).square().sum() / static_cast<double>(data.n() - 1);
        if (var > 0.0 && std::isfinite(var)) s.sigma2 = var;
    }
    s.scales = LatentScales::ones(problem.spec(), data.p());
    return s;
}

void RunConfig::validate() const {
    if (n_iter < 1) throw DomainError("n_iter must be positive, got " + std::to_string(n_iter));
    if (burn_in < 0 || burn_in >= n_iter) {
        throw DomainError("burn_in must satisfy 0 <= burn_in < n_iter, got " +
                          std::to_string(burn_in));
    }
    if (thin < 1) throw DomainError("thin must be positive, got " + std::to_string(thin));
}

ChainOutput run_chain(KernelKind kernel, const Problem& problem, const RunConfig& config) {
    config.validate();
    const Index p = problem.data().p();

    ChainState state = config.start ? *config.start : initial_state(problem);
    if (state.beta.size() != p) {
        throw DimensionError("initial beta: expected length " + std::to_string(p) + ", got " +
                             std::to_string(state.beta.size()));
    }
    if (!(state.sigma2 > 0.0) || !std::isfinite(state.sigma2)) {
        throw DomainError("initial sigma2 must be positive and finite");
    }
    state.scales.validate(problem.spec(), p);

    ChainOutput out;
    out.kernel = kernel;
    out.model = problem.spec().kind;
    out.n = problem.data().n();
    out.p = p;
    out.seed = config.seed;
    const long stored = config.stored_draws();
    out.sigma2_draws.reserve(static_cast<std::size_t>(stored));
    if (config.store_beta) out.beta_draws.resize(stored, p);

    RngStream rng(config.seed);
    const StepOptions options{config.freeze_latent_scales};
    long row = 0;

    const auto start = std::chrono::steady_clock::now();
    for (long it = 0; it < config.n_iter; ++it) {
        try {
            state = step(kernel, state, problem, rng, options);
        } catch (const Error& e) {
            throw ChainError(it, e.what());
        }
        if (!std::isfinite(state.sigma2) || !(state.sigma2 > 0.0) || !state.beta.allFinite()) {
            throw ChainError(it, "non-finite or non-positive draw");
        }
        if (it >= config.burn_in && (it - config.burn_in + 1) % config.thin == 0) {
            out.sigma2_draws.push_back(state.sigma2);
            if (config.store_beta) out.beta_draws.row(row) = state.beta.transpose();
            ++row;
        }
    }
    const auto stop = std::chrono::steady_clock::now();

    out.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
    out.final_state = std::move(state);
    return out;
}

ChainOutput run_chain(KernelKind kernel, const ModelSpec& spec, const Dataset& data,
                      const RunConfig& config) {
    return run_chain(kernel, Problem(data, spec), config);
}

std::vector<ChainResult> run_chains(std::span<const ChainJob> jobs, unsigned threads) {
    std::vector<ChainResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            const ChainJob& job = jobs[i];
            try {
                results[i].output = run_chain(job.kernel, *job.problem, job.config);
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    };
    const unsigned count =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
    if (count == 1) {
        worker();
        return results;
    }
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

}  // namespace shrinkmc
