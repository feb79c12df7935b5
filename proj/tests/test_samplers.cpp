#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "quadrature.hpp"
#include "shrinkmc/diagnostics.hpp"
#include "shrinkmc/error.hpp"
#include "shrinkmc/samplers.hpp"

using namespace shrinkmc;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

/// Mean and Monte Carlo standard error sd / sqrt(ESS).
Estimate estimate(std::span<const double> draws) {
    const Summary s = summarize(draws);
    return {s.mean, s.sd / std::sqrt(ess_univariate(draws))};
}

std::vector<double> column(const Matrix& m, Index j) {
    return std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows());
}

bool within(const Estimate& e, double target, double k) {
    return std::abs(e.mean - target) < k * e.se;
}

bool agree(const Estimate& a, const Estimate& b, double k) {
    return std::abs(a.mean - b.mean) < k * std::hypot(a.se, b.se);
}

Dataset tiny_group_data() {
    Matrix x(2, 1);
    x << 1.0, 0.0;
    return Dataset(vec({1.0, 1.0}), x);
}

Dataset tiny_fused_data() { return Dataset(vec({1.0, 2.0}), Matrix::Identity(2, 2)); }

Dataset synthetic_data(Index n, Index p, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> z;
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) x(i, j) = z(gen);
    }
    Vector y(n);
    for (Index i = 0; i < n; ++i) y[i] = x(i, 0) - 0.5 * x(i, p - 1) + z(gen);
    return Dataset(std::move(y), std::move(x));
}

ChainOutput long_run(KernelKind kernel, const Problem& problem, std::uint64_t seed,
                     long draws = 200000) {
    RunConfig config;
    config.n_iter = draws + 2000;
    config.burn_in = 2000;
    config.seed = seed;
    config.store_beta = true;
    return run_chain(kernel, problem, config);
}

void check_against_oracle(const Problem& problem, const oracle::Moments& truth,
                          std::uint64_t seed) {
    const ChainOutput two = long_run(KernelKind::TwoBlock, problem, seed);
    const ChainOutput three = long_run(KernelKind::ThreeBlock, problem, seed + 1);
    const Estimate s2 = estimate(two.sigma2_draws);
    const Estimate s3 = estimate(three.sigma2_draws);
    CHECK(within(s2, truth.sigma2_mean, 4.0));
    CHECK(within(s3, truth.sigma2_mean, 4.0));
    CHECK(agree(s2, s3, 4.0));
    for (Index j = 0; j < problem.data().p(); ++j) {
        const Estimate b2 = estimate(column(two.beta_draws, j));
        const Estimate b3 = estimate(column(three.beta_draws, j));
        CHECK(within(b2, truth.beta_mean[j], 4.0));
        CHECK(within(b3, truth.beta_mean[j], 4.0));
        CHECK(agree(b2, b3, 4.0));
    }
}

}  // namespace

TEST_SUITE("samplers") {

TEST_CASE("inverse-gaussian mean parameter") {
    CHECK(mixing_ig_mean(4.0, 2.0, 1.0) == 1.0);
    CHECK(mixing_ig_mean(0.75, 0.5, 3.0) == 1.0);
    CHECK(mixing_ig_mean(1.0, 1.0, 4.0) == 2.0);
    CHECK(std::isinf(mixing_ig_mean(0.0, 1.0, 1.0)));
}

TEST_CASE("constant fused coefficients take the limiting branch for every omega") {
    const Problem problem(tiny_fused_data(), ModelSpec::fused_lasso(1.0, 2.0));
    ChainState state;
    state.beta = vec({0.7, 0.7});
    state.sigma2 = 1.3;
    state.scales = LatentScales::ones(problem.spec(), 2);
    const double diff = state.beta[1] - state.beta[0];
    CHECK(std::isinf(mixing_ig_mean(diff * diff, 2.0, state.sigma2)));

    // omega^2 ~ Gamma(1/2, rate lambda2^2 / 2): mean 1 / lambda2^2 = 0.25.
    RngStream rng(3);
    std::vector<double> omega;
    for (int i = 0; i < 100000; ++i) omega.push_back(draw_latent_scales(state, problem, rng).omega2[0]);
    const Summary s = summarize(omega);
    CHECK(std::abs(s.mean - 0.25) < 4.0 * s.sd / std::sqrt(100000.0));
    CHECK(s.sd == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(0.02));
}

TEST_CASE("2BG with a zero design draws sigma^2 from its prior-data inverse gamma") {
    const Vector y = vec({1.0, -2.0, 0.5, 3.0, -1.0, 2.0});
    const Problem problem(Dataset(y, Matrix::Zero(6, 2)),
                          ModelSpec::group_lasso(GroupStructure({2}), 1.0, 1.0, 0.5));
    RunConfig config;
    config.n_iter = 100000;
    config.burn_in = 100;
    config.seed = 8;
    config.store_beta = true;
    const ChainOutput out = run_chain(KernelKind::TwoBlock, problem, config);

    // shape n/2 + alpha = 4, scale |Y|^2/2 + xi.
    const double mean = (0.5 * y.squaredNorm() + 0.5) / 3.0;
    const Summary s = summarize(out.sigma2_draws);
    // Independent of the latent scales, so the draws are i.i.d.
    CHECK(std::abs(s.mean - mean) < 4.0 * s.sd / std::sqrt(static_cast<double>(out.sigma2_draws.size())));
    CHECK(within(estimate(column(out.beta_draws, 0)), 0.0, 4.0));
    CHECK(within(estimate(column(out.beta_draws, 1)), 0.0, 4.0));
}

TEST_CASE("3BG sigma^2 conditional given the incoming beta") {
    const Dataset data = synthetic_data(8, 3, 4);
    const Problem problem(data, ModelSpec::group_lasso(GroupStructure({2, 1}), 1.0));
    const StepOptions frozen{true};

    for (const bool zero_beta : {true, false}) {
        ChainState state;
        state.beta = zero_beta ? Vector::Zero(3) : vec({0.5, -1.0, 2.0});
        state.sigma2 = 1.0;
        state.scales = LatentScales{vec({2.0, 0.5}), {}, {}};

        // Reference: shape (n + p)/2 = 5.5, scale (|Y - X b|^2 + b^T D^{-1} b) / 2.
        const Vector d_inv = vec({0.5, 0.5, 2.0});
        const double scale = 0.5 * ((data.y() - data.x() * state.beta).squaredNorm() +
                                    state.beta.dot(d_inv.asDiagonal() * state.beta));
        if (zero_beta) CHECK(scale == doctest::Approx(0.5 * data.y().squaredNorm()));
        const double mean = scale / 4.5;

        RngStream rng(12);
        std::vector<double> s2;
        for (int i = 0; i < 100000; ++i) s2.push_back(step_3bg_group(state, problem, rng, frozen).sigma2);
        const Summary s = summarize(s2);
        CHECK(std::abs(s.mean - mean) < 4.0 * s.sd / std::sqrt(100000.0));
    }
}

TEST_CASE("sparse group prior precision and the 3BG scale at beta = 0") {
    const ModelSpec spec = ModelSpec::sparse_group_lasso(GroupStructure({2, 1}), 1.0, 2.0);
    const LatentScales s{vec({2.0, 4.0}), vec({1.0, 3.0, 0.5}), {}};
    const PriorPrecision prior = prior_precision(spec, s);
    CHECK(prior.is_diagonal());
    CHECK(prior.diag()[0] == doctest::Approx(0.5 + 1.0));
    CHECK(prior.diag()[1] == doctest::Approx(0.5 + 1.0 / 3.0));
    CHECK(prior.diag()[2] == doctest::Approx(0.25 + 2.0));

    const Dataset data = synthetic_data(5, 3, 9);
    const auto params = conditional_sigma2_params(data, Vector::Zero(3), prior, 0.0, 0.0);
    CHECK(params.scale == doctest::Approx(0.5 * data.y().squaredNorm()));
    CHECK(params.shape == 4.0);
}

TEST_CASE("frozen-scale 2BG reproduces the exact conjugate posterior") {
    const Dataset data = synthetic_data(15, 4, 21);
    const Problem problem(data, ModelSpec::group_lasso(GroupStructure({2, 2}), 1.0));
    RunConfig config;
    config.n_iter = 100000;
    config.burn_in = 0;
    config.seed = 77;
    config.store_beta = true;
    config.freeze_latent_scales = true;
    config.start = ChainState{Vector::Zero(4), 1.0, LatentScales{vec({0.5, 3.0}), {}, {}}};
    const ChainOutput out = run_chain(KernelKind::TwoBlock, problem, config);

    // Dense reference with an explicit inverse.
    const Vector d_inv = vec({2.0, 2.0, 1.0 / 3.0, 1.0 / 3.0});
    const Matrix a = data.x().transpose() * data.x() + Matrix(d_inv.asDiagonal());
    const Matrix a_inv = a.inverse();
    const Vector mu = a_inv * data.x().transpose() * data.y();
    const double scale =
        0.5 * (data.y().squaredNorm() - data.y().dot(data.x() * a_inv * data.x().transpose() * data.y()));
    const double shape = 7.5;
    CHECK(within(estimate(out.sigma2_draws), scale / (shape - 1.0), 4.0));
    for (Index j = 0; j < 4; ++j) CHECK(within(estimate(column(out.beta_draws, j)), mu[j], 4.0));
}

TEST_CASE("both kernels target the quadrature posterior (proper sigma^2 prior)") {
    constexpr double alpha = 2.0;
    constexpr double xi = 1.0;
    SUBCASE("group lasso, p = 1") {
        const Dataset data = tiny_group_data();
        const auto truth = oracle::group_lasso_p1(data.y(), data.x(), 1.0, alpha, xi);
        check_against_oracle(Problem(data, ModelSpec::group_lasso(GroupStructure({1}), 1.0, alpha, xi)),
                             truth, 100);
    }
    SUBCASE("sparse group lasso, p = 1") {
        const Dataset data = tiny_group_data();
        const auto truth = oracle::sparse_group_lasso_p1(data.y(), data.x(), 1.0, 1.5, alpha, xi);
        check_against_oracle(
            Problem(data, ModelSpec::sparse_group_lasso(GroupStructure({1}), 1.0, 1.5, alpha, xi)),
            truth, 200);
    }
    SUBCASE("fused lasso, p = 2, X = I") {
        const Dataset data = tiny_fused_data();
        const auto truth = oracle::fused_lasso_p2(data.y(), data.x(), 1.0, 0.7, alpha, xi);
        check_against_oracle(Problem(data, ModelSpec::fused_lasso(1.0, 0.7, alpha, xi)), truth, 300);
    }
    SUBCASE("fused lasso, p = 2, dense design") {
        Matrix x(3, 2);
        x << 1.0, 0.5, -0.3, 1.0, 0.2, 0.1;
        const Dataset data(vec({1.0, 0.5, -0.4}), x);
        const auto truth = oracle::fused_lasso_p2(data.y(), data.x(), 0.8, 1.2, alpha, xi);
        check_against_oracle(Problem(data, ModelSpec::fused_lasso(0.8, 1.2, alpha, xi)), truth, 400);
    }
}

TEST_CASE("quadrature oracle is converged in its grid") {
    const Dataset data = tiny_group_data();
    const auto a = oracle::group_lasso_p1(data.y(), data.x(), 1.0, 2.0, 1.0);
    const auto b = oracle::group_lasso_p1(data.y(), data.x(), 1.0, 2.0, 1.0, {-90.0, 9.0, 8000});
    CHECK(a.sigma2_mean == doctest::Approx(b.sigma2_mean).epsilon(1e-9));
    CHECK(a.beta_mean[0] == doctest::Approx(b.beta_mean[0]).epsilon(1e-9));

    const auto f1 = oracle::fused_lasso_p2(tiny_fused_data().y(), tiny_fused_data().x(), 1, 1, 2, 1);
    const auto f2 = oracle::fused_lasso_p2(tiny_fused_data().y(), tiny_fused_data().x(), 1, 1, 2, 1,
                                           {-80.0, 8.0, 220});
    CHECK(f1.sigma2_mean == doctest::Approx(f2.sigma2_mean).epsilon(1e-6));
    CHECK(f1.beta_mean[1] == doctest::Approx(f2.beta_mean[1]).epsilon(1e-6));

    // The improper-prior instance has no posterior mean for sigma^2.
    CHECK(std::isinf(oracle::group_lasso_p1(data.y(), data.x(), 1.0, 0.0, 0.0).sigma2_mean));
}

TEST_CASE("exactly one factorization per step") {
    const Dataset dense = synthetic_data(6, 4, 2);
    const std::vector<std::pair<std::string, Problem>> problems = {
        {"group", Problem(dense, ModelSpec::group_lasso(GroupStructure({2, 2}), 1.0))},
        {"sparse", Problem(dense, ModelSpec::sparse_group_lasso(GroupStructure({3, 1}), 1.0, 1.0))},
        {"fused", Problem(dense, ModelSpec::fused_lasso(1.0, 1.0))},
        {"fused-identity", Problem(Dataset(vec({1, 2, 3}), Matrix::Identity(3, 3)),
                                   ModelSpec::fused_lasso(1.0, 1.0))},
    };
    for (const auto& [name, problem] : problems) {
        CAPTURE(name);
        for (const KernelKind kernel : {KernelKind::TwoBlock, KernelKind::ThreeBlock}) {
            RngStream rng(1);
            ChainState state = initial_state(problem);
            for (int i = 0; i < 20; ++i) {
                const auto before = factorization_count();
                state = step(kernel, state, problem, rng);
                CHECK(factorization_count() - before == 1);
            }
        }
    }
}

TEST_CASE("kernel functions check the model kind") {
    const Problem group(synthetic_data(5, 2, 1), ModelSpec::group_lasso(GroupStructure({2}), 1.0));
    const Problem fused(synthetic_data(5, 2, 1), ModelSpec::fused_lasso(1.0, 1.0));
    RngStream rng(1);
    const ChainState g = initial_state(group);
    const ChainState f = initial_state(fused);
    CHECK_NOTHROW(step_2bg_group(g, group, rng));
    CHECK_NOTHROW(step_3bg_group(g, group, rng));
    CHECK_NOTHROW(step_2bg_fused(f, fused, rng));
    CHECK_NOTHROW(step_3bg_fused(f, fused, rng));
    CHECK_THROWS_AS(step_2bg_fused(g, group, rng), DomainError);
    CHECK_THROWS_AS(step_3bg_sparse_group(g, group, rng), DomainError);
    CHECK_THROWS_AS(step_2bg_group(f, fused, rng), DomainError);
}

TEST_CASE("initial state") {
    const Dataset data(vec({1.0, 2.0, 3.0, 6.0}), Matrix::Identity(4, 4));
    const Problem problem(data, ModelSpec::fused_lasso(1.0, 1.0));
    const ChainState s = initial_state(problem);
    CHECK(s.beta == Vector::Zero(4));
    CHECK(s.sigma2 == doctest::Approx(14.0 / 3.0));
    CHECK(s.scales.tau2 == Vector::Ones(4));
    CHECK(s.scales.omega2 == Vector::Ones(3));
}

TEST_CASE("run_chain storage, determinism and positivity") {
    const Problem problem(synthetic_data(10, 5, 6),
                          ModelSpec::sparse_group_lasso(GroupStructure({3, 2}), 1.0, 1.0));
    RunConfig config;
    config.n_iter = 1000;
    config.burn_in = 100;
    config.seed = 5;
    config.store_beta = true;
    const ChainOutput a = run_chain(KernelKind::TwoBlock, problem, config);
    CHECK(a.sigma2_draws.size() == 900);
    CHECK(a.beta_draws.rows() == 900);
    CHECK(a.beta_draws.cols() == 5);
    CHECK(a.wall_time_seconds > 0.0);
    for (double s : a.sigma2_draws) REQUIRE(s > 0.0);
    CHECK(a.final_state.scales.tau2.minCoeff() > 0.0);
    CHECK(a.final_state.scales.gamma2.minCoeff() > 0.0);

    const ChainOutput b = run_chain(KernelKind::TwoBlock, problem, config);
    CHECK(a.sigma2_draws == b.sigma2_draws);
    CHECK(a.beta_draws == b.beta_draws);

    config.thin = 3;
    const ChainOutput thinned = run_chain(KernelKind::TwoBlock, problem, config);
    CHECK(thinned.sigma2_draws.size() == 300);
    // Draw k of the thinned chain is iteration burn_in + 3(k + 1) - 1.
    CHECK(thinned.sigma2_draws[0] == a.sigma2_draws[2]);
    CHECK(thinned.sigma2_draws[299] == a.sigma2_draws[899]);

    config.burn_in = 1000;
    CHECK_THROWS_AS(config.validate(), DomainError);
    config.burn_in = 10;
    config.thin = 0;
    CHECK_THROWS_AS(run_chain(KernelKind::TwoBlock, problem, config), DomainError);
}

TEST_CASE("chain failures report the iteration") {
    // Y = 0 with xi = 0 makes the 2BG sigma^2 scale zero at the first step.
    const Problem degenerate(Dataset(Vector::Zero(3), Matrix::Identity(3, 3)),
                             ModelSpec::fused_lasso(1.0, 1.0));
    RunConfig config;
    config.n_iter = 10;
    config.burn_in = 0;
    config.start = ChainState{Vector::Zero(3), 1.0, LatentScales::ones(degenerate.spec(), 3)};
    try {
        run_chain(KernelKind::TwoBlock, degenerate, config);
        FAIL("expected a ChainError");
    } catch (const ChainError& e) {
        CHECK(e.iteration() == 0);
        CHECK(std::string(e.what()).find("iteration 0") != std::string::npos);
    }
}

TEST_CASE("parallel chains match sequential runs in job order") {
    auto problem = std::make_shared<const Problem>(
        synthetic_data(12, 10, 3), ModelSpec::group_lasso(GroupStructure::uniform(2, 5), 1.0));
    auto broken = std::make_shared<const Problem>(Dataset(Vector::Zero(2), Matrix::Identity(2, 2)),
                                                  ModelSpec::fused_lasso(1.0, 1.0));
    std::vector<ChainJob> jobs;
    for (std::uint64_t s = 0; s < 6; ++s) {
        RunConfig c;
        c.n_iter = 300;
        c.burn_in = 50;
        c.seed = s;
        jobs.push_back({s % 2 ? KernelKind::ThreeBlock : KernelKind::TwoBlock, problem, c});
    }
    RunConfig c;
    c.n_iter = 10;
    c.burn_in = 0;
    c.start = ChainState{Vector::Zero(2), 1.0, LatentScales::ones(broken->spec(), 2)};
    jobs.push_back({KernelKind::TwoBlock, broken, c});

    const auto results = run_chains(jobs, 3);
    REQUIRE(results.size() == jobs.size());
    for (std::size_t i = 0; i + 1 < jobs.size(); ++i) {
        REQUIRE(results[i].output);
        const ChainOutput seq = run_chain(jobs[i].kernel, *jobs[i].problem, jobs[i].config);
        CHECK(results[i].output->sigma2_draws == seq.sigma2_draws);
        CHECK(results[i].output->seed == i);
    }
    CHECK_FALSE(results.back().output);
    CHECK(results.back().error.find("iteration 0") != std::string::npos);
}

}  // TEST_SUITE
