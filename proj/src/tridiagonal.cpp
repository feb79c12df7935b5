#include "shrinkmc/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shrinkmc/error.hpp"

namespace shrinkmc {

Eigen::VectorXd SymTridiagonal::multiply(const Eigen::VectorXd& x) const {
    const Eigen::Index m = size();
    Eigen::VectorXd y = diag.cwiseProduct(x);
    for (Eigen::Index j = 0; j + 1 < m; ++j) {
        y[j] += off[j] * x[j + 1];
        y[j + 1] += off[j] * x[j];
    }
    return y;
}

double SymTridiagonal::quadratic_form(const Eigen::VectorXd& x) const {
    double q = 0.0;
    for (Eigen::Index j = 0; j < size(); ++j) q += diag[j] * x[j] * x[j];
    for (Eigen::Index j = 0; j + 1 < size(); ++j) q += 2.0 * off[j] * x[j] * x[j + 1];
    return q;
}

Eigen::MatrixXd SymTridiagonal::dense() const {
    const Eigen::Index m = size();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    t.diagonal() = diag;
    for (Eigen::Index j = 0; j + 1 < m; ++j) {
        t(j, j + 1) = off[j];
        t(j + 1, j) = off[j];
    }
    return t;
}

TridiagonalCholesky::TridiagonalCholesky(const SymTridiagonal& t) {
    const Eigen::Index m = t.size();
    if (t.off.size() != std::max<Eigen::Index>(m - 1, 0)) {
        throw DimensionError("tridiagonal: off diagonal has length " +
                             std::to_string(t.off.size()) + ", expected " +
                             std::to_string(m - 1));
    }
    diag_.resize(m);
    sub_.resize(std::max<Eigen::Index>(m - 1, 0));
    double prev = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        double pivot = t.diag[j];
        if (j > 0) {
            sub_[j - 1] = t.off[j - 1] / prev;
            pivot -= sub_[j - 1] * sub_[j - 1];
        }
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw NumericalError("tridiagonal Cholesky: non-positive pivot at row " +
                                 std::to_string(j));
        }
        prev = std::sqrt(pivot);
        diag_[j] = prev;
    }
}

Eigen::VectorXd TridiagonalCholesky::solve_lower(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x(b.size());
    for (Eigen::Index j = 0; j < size(); ++j) {
        double r = b[j];
        if (j > 0) r -= sub_[j - 1] * x[j - 1];
        x[j] = r / diag_[j];
    }
    return x;
}

Eigen::VectorXd TridiagonalCholesky::solve_upper(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x(b.size());
    for (Eigen::Index j = size() - 1; j >= 0; --j) {
        double r = b[j];
        if (j + 1 < size()) r -= sub_[j] * x[j + 1];
        x[j] = r / diag_[j];
    }
    return x;
}

}  // namespace shrinkmc
