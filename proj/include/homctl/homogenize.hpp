#pragma once

#include "homctl/linalg.hpp"
#include "homctl/plant.hpp"

#include <vector>

namespace homctl {

/// Frobenius residuals of the homogenization conditions, one entry per mode.
struct HomogenizationResiduals {
    std::vector<double> sylvester;      ///< ||A G0 - G0 A + B Y0 - A||
    std::vector<double> input_kernel;   ///< ||G0 B||
    std::vector<double> degree;         ///< ||A0 Gd - (Gd + mu I) A0||
    std::vector<double> input_dilation; ///< ||Gd B - B||
    double relative_lsq = 0.0;          ///< ||M z - r|| / max(1, ||r||) of the stacked system
};

/// Degrees mu for which Gd = I + mu G0 stays anti-Hurwitz: lower < mu < upper.
struct DegreeWindow {
    double lower = -1.0;
    double upper = 0.0;
    bool lower_inclusive = true;
};

struct HomogenizationResult {
    Matrix G0;
    std::vector<Matrix> Y0;
    double mu = 0.0;
    Matrix Gd;
    std::vector<Matrix> K0;
    std::vector<Matrix> A0;
    HomogenizationResiduals residuals;
    double cond_G0_minus_I = 1.0;
    DegreeWindow admissible;
};

/// Minimum-norm least-squares solution of the stacked homogenization system, with no
/// feasibility decision. Unknown ordering: [vec(G0); vec(Y0_1); ...; vec(Y0_N)].
struct HomogenizationLeastSquares {
    Matrix G0;
    std::vector<Matrix> Y0;
    double relative_residual = 0.0;
    Eigen::Index rank = 0;
    Eigen::Index unknowns = 0;
};

HomogenizationLeastSquares homogenization_least_squares(const SwitchedPlant& plant);

struct HomogenizationOptions {
    double infeasibility_tol = 1e-8;
    double max_condition = 1e12;
    double nilpotency_tol = 1e-8;
};

/// Solve for (G0, Y0_sigma), then form Gd, K0_sigma, A0_sigma and check every identity.
/// Throws InfeasibleError, NumericalError (G0 - I singular) or PreconditionError
/// (mu < -1, or Gd not anti-Hurwitz at this mu).
HomogenizationResult solve_homogenization(const SwitchedPlant& plant, double mu,
                                          const HomogenizationOptions& opts = {});

/// Admissible degree window derived from the spectrum of G0.
DegreeWindow admissible_degrees(const Matrix& G0);

struct CommutatorCheck {
    double residual = 0.0;
    bool pass = false;
};

/// ||C Gd - Gd C - mu C||_F, passing when it is at most tol * max(1, ||C||_F).
CommutatorCheck check_commutator_degree(const Matrix& c, const Matrix& gd, double mu, double tol = 1e-8);

/// Checks Gd B = B and exp(s Gd) B = e^s B on s in {-1, -0.3, 0.7, 1}.
bool verify_dilation_of_input(const Matrix& gd, const Matrix& b, double tol = 1e-8);

}  // namespace homctl
