#pragma once

// Shrinkage-model data types and the deterministic constructions shared by
// all samplers: prior covariance / precision builders, the posterior
// precision A = X^T X + Sigma^{-1}, and the Inverse-Gamma parameter maps for
// sigma^2.
//
// Conventions:
//   Inverse-Gamma(shape a, scale b) has density proportional to
//   x^{-a-1} exp(-b / x).
//   Gamma(shape, rate) has density proportional to x^{shape-1} exp(-rate x).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "shrinkmc/tridiagonal.hpp"

namespace shrinkmc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Scale parameters below this floor are rejected rather than divided by.
inline constexpr double kScaleFloor = 1e-300;

/// Response vector and design matrix. All entries finite, rows(x) == size(y).
class Dataset {
public:
    Dataset(Vector y, Matrix x);

    const Vector& y() const { return y_; }
    const Matrix& x() const { return x_; }
    Index n() const { return x_.rows(); }
    Index p() const { return x_.cols(); }

private:
    Vector y_;
    Matrix x_;
};

/// Consecutive column groups G_1..G_K with sizes m_1..m_K.
class GroupStructure {
public:
    explicit GroupStructure(std::vector<Index> sizes);
    /// `count` groups of `size` columns each.
    static GroupStructure uniform(Index count, Index size);

    Index num_groups() const { return static_cast<Index>(sizes_.size()); }
    Index size(Index k) const { return sizes_[static_cast<std::size_t>(k)]; }
    Index offset(Index k) const { return offsets_[static_cast<std::size_t>(k)]; }
    /// Sum of group sizes; must equal p of the design it is used with.
    Index total() const { return total_; }
    const std::vector<Index>& sizes() const { return sizes_; }

    /// Throws DimensionError unless total() == p.
    void check_covers(Index p) const;

    bool operator==(const GroupStructure& other) const { return sizes_ == other.sizes_; }

private:
    std::vector<Index> sizes_;
    std::vector<Index> offsets_;
    Index total_ = 0;
};

enum class ModelKind { GroupLasso, SparseGroupLasso, FusedLasso };

/// "group-lasso", "sparse-group-lasso", "fused-lasso"
std::string_view to_string(ModelKind kind);
/// Inverse of to_string; throws DomainError on unknown names.
ModelKind parse_model_kind(std::string_view name);

/// Prior family and hyperparameters. `lambda` is used by the group lasso,
/// `lambda1`/`lambda2` by the other two kinds.
struct ModelSpec {
    ModelKind kind = ModelKind::GroupLasso;
    double alpha = 0.0;
    double xi = 0.0;
    double lambda = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    std::optional<GroupStructure> groups;

    static ModelSpec group_lasso(GroupStructure groups, double lambda, double alpha = 0.0,
                                 double xi = 0.0);
    static ModelSpec sparse_group_lasso(GroupStructure groups, double lambda1, double lambda2,
                                        double alpha = 0.0, double xi = 0.0);
    static ModelSpec fused_lasso(double lambda1, double lambda2, double alpha = 0.0,
                                 double xi = 0.0);

    bool is_grouped() const { return kind != ModelKind::FusedLasso; }

    /// Checks hyperparameter domains and compatibility with a design of p
    /// columns. Throws DomainError / DimensionError.
    void validate(Index p) const;
};

/// Mixing variances. tau2 has length K for the group models and p for the
/// fused model; gamma2 (length p) is used only by the sparse group lasso and
/// omega2 (length p - 1) only by the fused lasso. Unused vectors are empty.
struct LatentScales {
    Vector tau2;
    Vector gamma2;
    Vector omega2;

    /// All scales equal to one, sized for `spec` on p columns.
    static LatentScales ones(const ModelSpec& spec, Index p);
    /// Checks lengths and strict positivity.
    void validate(const ModelSpec& spec, Index p) const;
};

struct ChainState {
    Vector beta;
    double sigma2 = 1.0;
    LatentScales scales;
};

/// Diagonal of D_tau: tau_k^2 repeated m_k times in group order.
Vector build_group_cov(const LatentScales& scales, const GroupStructure& groups);

/// Diagonal of V_{tau,gamma}: entry j of group k is (1/tau_k^2 + 1/gamma_{k,j}^2)^{-1}.
Vector build_sparse_group_cov(const LatentScales& scales, const GroupStructure& groups);

/// Sigma_{tau,omega}^{-1}: diagonal 1/tau_j^2 + 1/omega_{j-1}^2 + 1/omega_j^2
/// (missing boundary terms dropped), off diagonal -1/omega_j^2.
SymTridiagonal build_fused_precision(const LatentScales& scales);

/// The inverse prior covariance Sigma_eta^{-1}, either diagonal (group
/// models) or symmetric tridiagonal (fused model). Never a dense p x p.
class PriorPrecision {
public:
    static PriorPrecision diagonal(Vector d);
    /// Inverts a diagonal covariance entrywise.
    static PriorPrecision from_covariance_diagonal(const Vector& cov);
    static PriorPrecision tridiagonal(SymTridiagonal t);

    bool is_diagonal() const { return off_.size() == 0; }
    Index size() const { return diag_.size(); }
    const Vector& diag() const { return diag_; }
    const Vector& off() const { return off_; }

    double quadratic_form(const Vector& beta) const;
    /// a += Sigma^{-1}
    void add_to(Matrix& a) const;
    Matrix dense() const;
    SymTridiagonal as_tridiagonal() const { return {diag_, off_}; }

private:
    Vector diag_;
    Vector off_;
};

/// Sigma_eta^{-1} for the model kind in `spec`.
PriorPrecision prior_precision(const ModelSpec& spec, const LatentScales& scales);

/// A = X^T X + Sigma_eta^{-1}.
Matrix assemble_posterior_precision(const Dataset& data, const PriorPrecision& prior);

struct InverseGammaParams {
    double shape = 0.0;
    double scale = 0.0;
    /// Set when xi == 0 and the data term is within rounding of zero.
    bool small_scale_warning = false;
};

/// sigma^2 | eta, Y with beta integrated out:
/// shape n/2 + alpha, scale Y^T (I - X A^{-1} X^T) Y / 2 + xi.
InverseGammaParams marginal_sigma2_params(const Dataset& data, const PriorPrecision& prior,
                                          double alpha, double xi);

/// sigma^2 | beta, eta, Y:
/// shape (n + p + 2 alpha)/2, scale (|Y - X beta|^2 + beta^T Sigma^{-1} beta + 2 xi)/2.
InverseGammaParams conditional_sigma2_params(const Dataset& data, const Vector& beta,
                                             const PriorPrecision& prior, double alpha,
                                             double xi);

/// beta | sigma^2, eta, Y ~ N(A^{-1} X^T Y, sigma^2 A^{-1}). The covariance is
/// carried as (A, sigma^2) plus the Cholesky factor of A.
struct BetaConditional {
    Vector mean;
    Matrix precision;
    double sigma2 = 1.0;
    Eigen::LLT<Matrix> factor;

    /// Materializes sigma^2 A^{-1}.
    Matrix covariance() const;
};

BetaConditional beta_conditional_params(const Dataset& data, const PriorPrecision& prior,
                                        double sigma2);

}  // namespace shrinkmc
