#pragma once

#include <Eigen/Dense>

namespace shrinkmc {

/// Symmetric tridiagonal matrix stored as its main and first off diagonal.
struct SymTridiagonal {
    Eigen::VectorXd diag;  // length m
    Eigen::VectorXd off;   // length m - 1, entry j couples rows j and j + 1

    Eigen::Index size() const { return diag.size(); }

    /// y = T x
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    double quadratic_form(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd dense() const;
};

/// Cholesky factor T = L L^T of a symmetric positive definite tridiagonal
/// matrix. L is lower bidiagonal, so factorization and solves are O(m).
class TridiagonalCholesky {
public:
    TridiagonalCholesky() = default;
    /// Throws NumericalError if a pivot is not strictly positive.
    explicit TridiagonalCholesky(const SymTridiagonal& t);

    Eigen::Index size() const { return diag_.size(); }

    /// L^{-1} b
    Eigen::VectorXd solve_lower(const Eigen::VectorXd& b) const;
    /// L^{-T} b
    Eigen::VectorXd solve_upper(const Eigen::VectorXd& b) const;
    /// T^{-1} b
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return solve_upper(solve_lower(b)); }

    const Eigen::VectorXd& diag() const { return diag_; }
    const Eigen::VectorXd& sub() const { return sub_; }

private:
    Eigen::VectorXd diag_;
    Eigen::VectorXd sub_;
};

}  // namespace shrinkmc
