#pragma once

// Factorization of the posterior precision A = X^T X + Sigma^{-1}, shared by
// the sigma^2 and beta updates of one Gibbs step.

#include <cstdint>
#include <variant>

#include "shrinkmc/model.hpp"

namespace shrinkmc {

/// Data summaries that do not change across iterations.
struct GramCache {
    explicit GramCache(const Dataset& data);

    Matrix xtx;
    Vector xty;
    double yty = 0.0;
    /// X is exactly the n x n identity; enables the banded fast path.
    bool identity_design = false;
};

/// Number of posterior-precision factorizations performed on the calling
/// thread since it started. Used to verify the cost structure of a step.
std::uint64_t factorization_count();

/// One Cholesky factorization A = L L^T. Dense in general; O(p) bidiagonal
/// when X = I and the prior precision is tridiagonal (or diagonal).
class PosteriorFactor {
public:
    PosteriorFactor(const GramCache& gram, const PriorPrecision& prior);
    ~PosteriorFactor();
    PosteriorFactor(PosteriorFactor&&) noexcept = default;
    PosteriorFactor& operator=(PosteriorFactor&&) noexcept = default;
    PosteriorFactor(const PosteriorFactor&) = delete;
    PosteriorFactor& operator=(const PosteriorFactor&) = delete;

    Index size() const { return dim_; }
    bool banded() const { return std::holds_alternative<TridiagonalCholesky>(factor_); }

    /// L^{-1} b
    Vector solve_lower(const Vector& b) const;
    /// L^{-T} b
    Vector solve_upper(const Vector& b) const;
    /// A^{-1} b
    Vector solve(const Vector& b) const { return solve_upper(solve_lower(b)); }

    /// A^{-1} X^T Y, computed once.
    const Vector& mean() const { return mean_; }

    /// Y^T (I - X A^{-1} X^T) Y evaluated as |Y - X mu|^2 + mu^T Sigma^{-1} mu,
    /// a sum of nonnegative terms.
    double residual_quadratic(const Dataset& data, const PriorPrecision& prior) const;

    /// The same quantity as Y^T Y - (X^T Y)^T A^{-1} (X^T Y). Cheaper but
    /// subject to cancellation when A is ill conditioned.
    double projector_quadratic(const GramCache& gram) const;

private:
    Index dim_ = 0;
    /// Dense case: L in the lower triangle. Its storage is recycled through a
    /// per-thread pool so a step does not allocate a fresh p x p block.
    std::variant<Matrix, TridiagonalCholesky> factor_;
    Vector mean_;
};

}  // namespace shrinkmc
