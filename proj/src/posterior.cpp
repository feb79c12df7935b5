#include "shrinkmc/posterior.hpp"

#include <string>
#include <vector>

#include "shrinkmc/error.hpp"

namespace shrinkmc {

namespace {

thread_local std::uint64_t g_factorizations = 0;

bool is_identity(const Matrix& x) {
    if (x.rows() != x.cols()) return false;
    for (Index j = 0; j < x.cols(); ++j) {
        for (Index i = 0; i < x.rows(); ++i) {
            if (x(i, j) != (i == j ? 1.0 : 0.0)) return false;
        }
    }
    return true;
}

constexpr std::size_t kPoolCapacity = 4;
thread_local std::vector<Matrix> g_pool;

Matrix acquire_matrix(Index dim) {
    for (auto it = g_pool.begin(); it != g_pool.end(); ++it) {
        if (it->rows() == dim) {
            Matrix m = std::move(*it);
            g_pool.erase(it);
            return m;
        }
    }
    return Matrix(dim, dim);
}

void release_matrix(Matrix&& m) {
    if (m.size() == 0) return;
    if (g_pool.size() >= kPoolCapacity) g_pool.erase(g_pool.begin());
    g_pool.push_back(std::move(m));
}

}  // namespace

GramCache::GramCache(const Dataset& data)
    : xtx(data.x().transpose() * data.x()),
      xty(data.x().transpose() * data.y()),
      yty(data.y().squaredNorm()),
      identity_design(is_identity(data.x())) {}

std::uint64_t factorization_count() { return g_factorizations; }

PosteriorFactor::PosteriorFactor(const GramCache& gram, const PriorPrecision& prior)
    : dim_(gram.xtx.rows()) {
    if (prior.size() != dim_) {
        throw DimensionError("prior precision has size " + std::to_string(prior.size()) +
                             ", expected " + std::to_string(dim_));
    }
    ++g_factorizations;
    if (gram.identity_design) {
        SymTridiagonal a = prior.is_diagonal()
                               ? SymTridiagonal{prior.diag(), Vector::Zero(dim_ - 1)}
                               : prior.as_tridiagonal();
        a.diag.array() += 1.0;
        factor_ = TridiagonalCholesky(a);
    } else {
        Matrix a = acquire_matrix(dim_);
        a = gram.xtx;
        prior.add_to(a);
        Eigen::LLT<Eigen::Ref<Matrix>> llt(a);
        if (llt.info() != Eigen::Success) {
            release_matrix(std::move(a));
            throw NumericalError("posterior precision X^T X + Sigma^{-1} is not positive definite");
        }
        factor_ = std::move(a);
    }
    mean_ = solve(gram.xty);
    if (!mean_.allFinite()) throw NumericalError("posterior mean is not finite");
}

PosteriorFactor::~PosteriorFactor() {
    if (auto* m = std::get_if<Matrix>(&factor_)) release_matrix(std::move(*m));
}

Vector PosteriorFactor::solve_lower(const Vector& b) const {
    if (const auto* t = std::get_if<TridiagonalCholesky>(&factor_)) return t->solve_lower(b);
    return std::get<Matrix>(factor_).triangularView<Eigen::Lower>().solve(b);
}

Vector PosteriorFactor::solve_upper(const Vector& b) const {
    if (const auto* t = std::get_if<TridiagonalCholesky>(&factor_)) return t->solve_upper(b);
    return std::get<Matrix>(factor_).triangularView<Eigen::Lower>().transpose().solve(b);
}

double PosteriorFactor::residual_quadratic(const Dataset& data, const PriorPrecision& prior) const {
    const double rss = banded() ? (data.y() - mean_).squaredNorm()
                                : (data.y() - data.x() * mean_).squaredNorm();
    return rss + prior.quadratic_form(mean_);
}

double PosteriorFactor::projector_quadratic(const GramCache& gram) const {
    return gram.yty - solve_lower(gram.xty).squaredNorm();
}

}  // namespace shrinkmc
