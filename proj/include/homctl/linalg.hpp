#pragma once

#include <Eigen/Dense>

#include <vector>

namespace homctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SpectrumSummary {
    std::vector<double> eigenvalue_real_parts;
    double min_real = 0.0;
    double max_real = 0.0;
};

struct AntiHurwitzResult {
    bool anti_hurwitz = false;
    SpectrumSummary spectrum;
};

/// exp(s*M) by scaling and squaring with diagonal Pade approximants (degree 3..13).
/// s == 0 returns the identity exactly.
Matrix mat_exp(const Matrix& m, double s = 1.0);

SpectrumSummary spectrum(const Matrix& m);

/// True iff every eigenvalue has real part strictly greater than `margin`.
AntiHurwitzResult is_anti_hurwitz(const Matrix& m, double margin = 0.0);

/// Dual test: the n-th power must vanish relative to ||M||^n and every eigenvalue
/// modulus must lie below tol^(1/n) * max(1, ||M||). Both must pass.
bool is_nilpotent(const Matrix& m, double tol = 1e-8);

/// Kalman rank test, rank decided by singular values above 1e-10 * sigma_max.
bool kalman_controllable(const Matrix& a, const Matrix& b);

/// Smallest eigenvalue of (M + M^T) / 2.
double min_eig_sym(const Matrix& m);
double max_eig_sym(const Matrix& m);

/// Principal square root of a symmetric positive semidefinite matrix.
Matrix sqrt_spd(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Eigen::Ref<const Vector>& v, Eigen::Index rows, Eigen::Index cols);

Matrix symmetrize(const Matrix& m);

bool all_finite(const Matrix& m);

void require_square(const Matrix& m, const char* what);

}  // namespace homctl
