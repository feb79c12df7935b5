#pragma once

// Two-block (2BG) and three-block (3BG) Gibbs kernels for the group lasso,
// sparse group lasso and fused lasso, and the chain driver.
//
// Both kernels first redraw the latent scales from their full conditional
// given the incoming (beta, sigma^2). They differ in the sigma^2 update:
//   2BG draws sigma^2 | eta, Y with beta integrated out, then beta | sigma^2;
//   3BG draws sigma^2 | beta_old, eta, Y, then beta | sigma^2.
// Each step factorizes A = X^T X + Sigma^{-1} exactly once.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "shrinkmc/model.hpp"
#include "shrinkmc/posterior.hpp"
#include "shrinkmc/rng.hpp"

namespace shrinkmc {

enum class KernelKind { TwoBlock, ThreeBlock };

/// "2bg" / "3bg"
std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

/// A validated (dataset, model) pair with its precomputed Gram summaries.
class Problem {
public:
    Problem(Dataset data, ModelSpec spec);

    const Dataset& data() const { return data_; }
    const ModelSpec& spec() const { return spec_; }
    const GramCache& gram() const { return gram_; }

private:
    Dataset data_;
    ModelSpec spec_;
    GramCache gram_;
};

struct StepOptions {
    /// Test hook: keep the latent scales fixed so the (sigma^2, beta) block is
    /// drawn from its exact conditional given those scales.
    bool freeze_latent = false;
};

/// Mean parameter sqrt(lambda^2 sigma^2 / sq_norm) of the Inverse-Gaussian
/// conditional of 1/tau^2. +inf when sq_norm == 0, which selects the
/// limiting Gamma draw.
double mixing_ig_mean(double sq_norm, double lambda, double sigma2);

/// Redraws the latent scales from their full conditional given the state's
/// (beta, sigma^2). Components whose coefficient block is exactly zero use
/// the limiting draw tau^2 ~ Gamma(1/2, rate lambda^2/2).
LatentScales draw_latent_scales(const ChainState& state, const Problem& problem,
                                RngStream& rng);

ChainState step_2bg_group(const ChainState& state, const Problem& problem, RngStream& rng,
                          const StepOptions& options = {});
ChainState step_3bg_group(const ChainState& state, const Problem& problem, RngStream& rng,
                          const StepOptions& options = {});
ChainState step_2bg_sparse_group(const ChainState& state, const Problem& problem,
                                 RngStream& rng, const StepOptions& options = {});
ChainState step_3bg_sparse_group(const ChainState& state, const Problem& problem,
                                 RngStream& rng, const StepOptions& options = {});
ChainState step_2bg_fused(const ChainState& state, const Problem& problem, RngStream& rng,
                          const StepOptions& options = {});
ChainState step_3bg_fused(const ChainState& state, const Problem& problem, RngStream& rng,
                          const StepOptions& options = {});

/// Dispatches on the kernel and on problem.spec().kind.
ChainState step(KernelKind kernel, const ChainState& state, const Problem& problem,
                RngStream& rng, const StepOptions& options = {});

/// beta = 0, sigma^2 = sample variance of Y, all latent scales = 1.
ChainState initial_state(const Problem& problem);

struct RunConfig {
    long n_iter = 10000;
    long burn_in = 1000;
    std::uint64_t seed = 0;
    bool store_beta = false;
    long thin = 1;
    /// Test hook, see StepOptions.
    bool freeze_latent_scales = false;
    /// Overrides initial_state() when set.
    std::optional<ChainState> start;

    void validate() const;
    /// Number of stored draws: (n_iter - burn_in) / thin, rounded down.
    long stored_draws() const { return (n_iter - burn_in) / thin; }
};

struct ChainOutput {
    std::vector<double> sigma2_draws;
    /// draws x p; empty unless RunConfig::store_beta.
    Matrix beta_draws;
    /// Monotonic-clock time of the whole iteration loop, burn-in included.
    double wall_time_seconds = 0.0;
    KernelKind kernel = KernelKind::TwoBlock;
    ModelKind model = ModelKind::GroupLasso;
    Index n = 0;
    Index p = 0;
    std::uint64_t seed = 0;
    ChainState final_state;
};

/// Runs one chain. Draws come from RngStream(config.seed). Throws ChainError
/// (with the failing iteration) on any step failure or non-finite draw.
ChainOutput run_chain(KernelKind kernel, const Problem& problem, const RunConfig& config);
ChainOutput run_chain(KernelKind kernel, const ModelSpec& spec, const Dataset& data,
                      const RunConfig& config);

struct ChainJob {
    KernelKind kernel = KernelKind::TwoBlock;
    std::shared_ptr<const Problem> problem;
    RunConfig config;
};

/// Result slot of a parallel job: an output or the error message.
struct ChainResult {
    std::optional<ChainOutput> output;
    std::string error;
};

/// Runs independent chains on up to `threads` worker threads. Results are in
/// job order regardless of completion order.
std::vector<ChainResult> run_chains(std::span<const ChainJob> jobs, unsigned threads);

}  // namespace shrinkmc
