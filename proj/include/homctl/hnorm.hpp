#pragma once

#include "homctl/linalg.hpp"

#include <complex>
#include <optional>

namespace homctl {

/// Linear dilation d(s) = exp(s Gd) paired with the weighted Euclidean norm ||x||_P.
/// Construction checks P > 0 and P Gd + Gd^T P > 0.
class DilationContext {
public:
    DilationContext(Matrix gd, Matrix p);

    const Matrix& Gd() const noexcept { return gd_; }
    const Matrix& P() const noexcept { return p_; }
    Eigen::Index dim() const noexcept { return gd_.rows(); }

    /// Extreme generalized eigenvalues of ((P Gd + Gd^T P)/2, P).
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }

    Matrix dilation(double s) const;
    Vector dilate(double s, const Vector& x) const;
    double p_norm(const Vector& x) const;

    /// True when d(s) is evaluated through the eigendecomposition of Gd instead of mat_exp.
    bool diagonalizable() const noexcept { return fast_; }

private:
    friend class NormSolver;
    Matrix gd_;
    Matrix p_;
    Matrix sym_;  // (P Gd + Gd^T P) / 2
    double alpha_ = 0.0;
    double beta_ = 0.0;
    bool fast_ = false;
    Eigen::MatrixXcd vec_;
    Eigen::MatrixXcd vec_inv_;
    Eigen::VectorXcd lambda_;
};

struct NormEvaluation {
    double value = 0.0;  ///< ||x||_d
    double log_value = 0.0;
    Vector projection;   ///< d(-ln ||x||_d) x, empty when x = 0
    int iterations = 0;
};

/// Canonical homogeneous norm with the projection. `hint` is a starting guess for ln V.
NormEvaluation evaluate_norm(const Vector& x, const DilationContext& ctx, double rel_tol = 1e-10,
                             std::optional<double> hint = std::nullopt);

double canonical_norm(const Vector& x, const DilationContext& ctx, double rel_tol = 1e-10);

/// Throws PreconditionError for x = 0.
Vector projector(const Vector& x, const DilationContext& ctx, double rel_tol = 1e-10);

/// Gradient of ||x||_d as a row covector. Throws PreconditionError for x = 0.
Eigen::RowVectorXd hnorm_gradient(const Vector& x, const DilationContext& ctx);

}  // namespace homctl
