#include "shrinkmc/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "shrinkmc/error.hpp"
#include "shrinkmc/posterior.hpp"

namespace shrinkmc {

namespace {

void require_length(const char* what, Index actual, Index expected) {
    if (actual != expected) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                             ", got " + std::to_string(actual));
    }
}

void require_positive(const char* what, const Vector& v) {
    for (Index i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
            throw DomainError(std::string(what) + "[" + std::to_string(i) +
                              "] must be positive and finite, got " + std::to_string(v[i]));
        }
    }
}

void require_hyper(const char* what, double value, bool strictly_positive) {
    const bool ok = std::isfinite(value) && (strictly_positive ? value > 0.0 : value >= 0.0);
    if (!ok) {
        throw DomainError(std::string(what) + (strictly_positive ? " must be > 0" : " must be >= 0") +
                          ", got " + std::to_string(value));
    }
}

double sigma2_scale_or_throw(double scale) {
    if (!(scale > kScaleFloor) || !std::isfinite(scale)) {
        throw DomainError(
            "sigma^2 scale parameter is not positive (" + std::to_string(scale) +
            "); this happens only for degenerate data with xi = 0, use xi > 0");
    }
    return scale;
}

}  // namespace

Dataset::Dataset(Vector y, Matrix x) : y_(std::move(y)), x_(std::move(x)) {
    if (y_.size() != x_.rows()) {
        throw DimensionError("dataset: y has length " + std::to_string(y_.size()) + " but x has " +
                             std::to_string(x_.rows()) + " rows");
    }
    if (x_.rows() < 1 || x_.cols() < 1) {
        throw DimensionError("dataset: n and p must be positive");
    }
    if (!y_.allFinite() || !x_.allFinite()) {
        throw DomainError("dataset: all entries of y and x must be finite");
    }
}

GroupStructure::GroupStructure(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw DimensionError("group structure: at least one group is required");
    offsets_.reserve(sizes_.size());
    for (std::size_t k = 0; k < sizes_.size(); ++k) {
        if (sizes_[k] < 1) {
            throw DimensionError("group structure: group " + std::to_string(k + 1) +
                                 " has size " + std::to_string(sizes_[k]));
        }
        offsets_.push_back(total_);
        total_ += sizes_[k];
    }
}

GroupStructure GroupStructure::uniform(Index count, Index size) {
    if (count < 1) throw DimensionError("group structure: at least one group is required");
    return GroupStructure(std::vector<Index>(static_cast<std::size_t>(count), size));
}

void GroupStructure::check_covers(Index p) const {
    if (total_ != p) {
        throw DimensionError("group sizes sum " + std::to_string(total_) + " != p " +
                             std::to_string(p));
    }
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::GroupLasso: return "group-lasso";
        case ModelKind::SparseGroupLasso: return "sparse-group-lasso";
        case ModelKind::FusedLasso: return "fused-lasso";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "group-lasso") return ModelKind::GroupLasso;
    if (name == "sparse-group-lasso") return ModelKind::SparseGroupLasso;
    if (name == "fused-lasso") return ModelKind::FusedLasso;
    throw DomainError("unknown model '" + std::string(name) +
                      "' (expected group-lasso, sparse-group-lasso or fused-lasso)");
}

ModelSpec ModelSpec::group_lasso(GroupStructure groups, double lambda, double alpha, double xi) {
    ModelSpec spec;
    spec.kind = ModelKind::GroupLasso;
    spec.groups = std::move(groups);
    spec.lambda = lambda;
    spec.alpha = alpha;
    spec.xi = xi;
    return spec;
}

ModelSpec ModelSpec::sparse_group_lasso(GroupStructure groups, double lambda1, double lambda2,
                                        double alpha, double xi) {
    ModelSpec spec;
    spec.kind = ModelKind::SparseGroupLasso;
    spec.groups = std::move(groups);
    spec.lambda1 = lambda1;
    spec.lambda2 = lambda2;
    spec.alpha = alpha;
    spec.xi = xi;
    return spec;
}

ModelSpec ModelSpec::fused_lasso(double lambda1, double lambda2, double alpha, double xi) {
    ModelSpec spec;
    spec.kind = ModelKind::FusedLasso;
    spec.lambda1 = lambda1;
    spec.lambda2 = lambda2;
    spec.alpha = alpha;
    spec.xi = xi;
    return spec;
}

void ModelSpec::validate(Index p) const {
    require_hyper("alpha", alpha, false);
    require_hyper("xi", xi, false);
    switch (kind) {
        case ModelKind::GroupLasso:
            require_hyper("lambda", lambda, true);
            break;
        case ModelKind::SparseGroupLasso:
        case ModelKind::FusedLasso:
            require_hyper("lambda1", lambda1, true);
            require_hyper("lambda2", lambda2, true);
            break;
    }
    if (is_grouped()) {
        if (!groups) throw DimensionError(std::string(to_string(kind)) + " requires a group structure");
        groups->check_covers(p);
    } else if (p < 2) {
        throw DimensionError("fused-lasso requires p >= 2, got p = " + std::to_string(p));
    }
}

LatentScales LatentScales::ones(const ModelSpec& spec, Index p) {
    LatentScales s;
    switch (spec.kind) {
        case ModelKind::GroupLasso:
            s.tau2 = Vector::Ones(spec.groups->num_groups());
            break;
        case ModelKind::SparseGroupLasso:
            s.tau2 = Vector::Ones(spec.groups->num_groups());
            s.gamma2 = Vector::Ones(p);
            break;
        case ModelKind::FusedLasso:
            s.tau2 = Vector::Ones(p);
            s.omega2 = Vector::Ones(p - 1);
            break;
    }
    return s;
}

void LatentScales::validate(const ModelSpec& spec, Index p) const {
    switch (spec.kind) {
        case ModelKind::GroupLasso:
            require_length("tau2", tau2.size(), spec.groups->num_groups());
            break;
        case ModelKind::SparseGroupLasso:
            require_length("tau2", tau2.size(), spec.groups->num_groups());
            require_length("gamma2", gamma2.size(), p);
            break;
        case ModelKind::FusedLasso:
            require_length("tau2", tau2.size(), p);
            require_length("omega2", omega2.size(), p - 1);
            break;
    }
    require_positive("tau2", tau2);
    require_positive("gamma2", gamma2);
    require_positive("omega2", omega2);
}

Vector build_group_cov(const LatentScales& scales, const GroupStructure& groups) {
    require_length("tau2", scales.tau2.size(), groups.num_groups());
    require_positive("tau2", scales.tau2);
    Vector d(groups.total());
    for (Index k = 0; k < groups.num_groups(); ++k) {
        d.segment(groups.offset(k), groups.size(k)).setConstant(scales.tau2[k]);
    }
    return d;
}

Vector build_sparse_group_cov(const LatentScales& scales, const GroupStructure& groups) {
    require_length("tau2", scales.tau2.size(), groups.num_groups());
    require_length("gamma2", scales.gamma2.size(), groups.total());
    require_positive("tau2", scales.tau2);
    require_positive("gamma2", scales.gamma2);
    Vector v(groups.total());
    for (Index k = 0; k < groups.num_groups(); ++k) {
        const double inv_tau2 = 1.0 / scales.tau2[k];
        for (Index j = groups.offset(k); j < groups.offset(k) + groups.size(k); ++j) {
            v[j] = 1.0 / (inv_tau2 + 1.0 / scales.gamma2[j]);
        }
    }
    return v;
}

SymTridiagonal build_fused_precision(const LatentScales& scales) {
    const Index p = scales.tau2.size();
    if (p < 2) throw DimensionError("fused precision requires p >= 2, got " + std::to_string(p));
    require_length("omega2", scales.omega2.size(), p - 1);
    require_positive("tau2", scales.tau2);
    require_positive("omega2", scales.omega2);

    SymTridiagonal t;
    t.diag = scales.tau2.cwiseInverse();
    t.off = -scales.omega2.cwiseInverse();
    for (Index j = 0; j + 1 < p; ++j) {
        const double w = 1.0 / scales.omega2[j];
        t.diag[j] += w;
        t.diag[j + 1] += w;
    }
    return t;
}

PriorPrecision PriorPrecision::diagonal(Vector d) {
    require_positive("prior precision diagonal", d);
    PriorPrecision out;
    out.diag_ = std::move(d);
    return out;
}

PriorPrecision PriorPrecision::from_covariance_diagonal(const Vector& cov) {
    require_positive("prior covariance diagonal", cov);
    return diagonal(cov.cwiseInverse());
}

PriorPrecision PriorPrecision::tridiagonal(SymTridiagonal t) {
    require_length("prior precision off diagonal", t.off.size(), t.size() - 1);
    PriorPrecision out;
    out.diag_ = std::move(t.diag);
    out.off_ = std::move(t.off);
    return out;
}

double PriorPrecision::quadratic_form(const Vector& beta) const {
    if (is_diagonal()) return beta.dot(diag_.cwiseProduct(beta));
    return as_tridiagonal().quadratic_form(beta);
}

void PriorPrecision::add_to(Matrix& a) const {
    a.diagonal() += diag_;
    for (Index j = 0; j < off_.size(); ++j) {
        a(j, j + 1) += off_[j];
        a(j + 1, j) += off_[j];
    }
}

Matrix PriorPrecision::dense() const {
    Matrix m = Matrix::Zero(size(), size());
    add_to(m);
    return m;
}

PriorPrecision prior_precision(const ModelSpec& spec, const LatentScales& scales) {
    switch (spec.kind) {
        case ModelKind::GroupLasso:
            return PriorPrecision::from_covariance_diagonal(build_group_cov(scales, *spec.groups));
        case ModelKind::SparseGroupLasso:
            return PriorPrecision::from_covariance_diagonal(
                build_sparse_group_cov(scales, *spec.groups));
        case ModelKind::FusedLasso:
            return PriorPrecision::tridiagonal(build_fused_precision(scales));
    }
    throw DomainError("unknown model kind");
}

Matrix assemble_posterior_precision(const Dataset& data, const PriorPrecision& prior) {
    require_length("prior precision", prior.size(), data.p());
    Matrix a = data.x().transpose() * data.x();
    prior.add_to(a);
    return a;
}

InverseGammaParams marginal_sigma2_params(const Dataset& data, const PriorPrecision& prior,
                                          double alpha, double xi) {
    require_hyper("alpha", alpha, false);
    require_hyper("xi", xi, false);
    require_length("prior precision", prior.size(), data.p());
    const GramCache gram(data);
    const PosteriorFactor factor(gram, prior);
    const double quad = factor.residual_quadratic(data, prior);

    InverseGammaParams params;
    params.shape = 0.5 * static_cast<double>(data.n()) + alpha;
    params.scale = sigma2_scale_or_throw(0.5 * quad + xi);
    params.small_scale_warning = xi == 0.0 && quad <= 1e-12 * gram.yty;
    return params;
}

InverseGammaParams conditional_sigma2_params(const Dataset& data, const Vector& beta,
                                             const PriorPrecision& prior, double alpha,
                                             double xi) {
    require_hyper("alpha", alpha, false);
    require_hyper("xi", xi, false);
    require_length("beta", beta.size(), data.p());
    require_length("prior precision", prior.size(), data.p());
    const double rss = (data.y() - data.x() * beta).squaredNorm();
    const double penalty = prior.quadratic_form(beta);

    InverseGammaParams params;
    params.shape = 0.5 * static_cast<double>(data.n() + data.p()) + alpha;
    params.scale = sigma2_scale_or_throw(0.5 * (rss + penalty + 2.0 * xi));
    params.small_scale_warning = xi == 0.0 && rss + penalty <= 1e-12 * data.y().squaredNorm();
    return params;
}

Matrix BetaConditional::covariance() const {
    return sigma2 * factor.solve(Matrix::Identity(mean.size(), mean.size()));
}

BetaConditional beta_conditional_params(const Dataset& data, const PriorPrecision& prior,
                                        double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw DomainError("sigma2 must be positive and finite, got " + std::to_string(sigma2));
    }
    BetaConditional out;
    out.precision = assemble_posterior_precision(data, prior);
    out.factor.compute(out.precision);
    if (out.factor.info() != Eigen::Success) {
        throw NumericalError("posterior precision X^T X + Sigma^{-1} is not positive definite");
    }
    out.mean = out.factor.solve(data.x().transpose() * data.y());
    out.sigma2 = sigma2;
    return out;
}

}  // namespace shrinkmc
