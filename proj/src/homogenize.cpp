#include "homctl/homogenize.hpp"

#include "homctl/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace homctl {

HomogenizationLeastSquares homogenization_least_squares(const SwitchedPlant& plant) {
    const Eigen::Index n = plant.n();
    const Eigen::Index m = plant.m();
    const auto modes = static_cast<Eigen::Index>(plant.mode_count());
    const Eigen::Index n2 = n * n;
    const Eigen::Index unknowns = n2 + modes * m * n;
    const Eigen::Index eqs_per_mode = n2 + n * m;

    const Matrix ident = Matrix::Identity(n, n);
    Matrix system = Matrix::Zero(modes * eqs_per_mode, unknowns);
    Vector rhs = Vector::Zero(modes * eqs_per_mode);

    for (Eigen::Index k = 0; k < modes; ++k) {
        const Mode& md = plant.mode(static_cast<std::size_t>(k));
        const Eigen::Index row = k * eqs_per_mode;
        // vec(A G0 - G0 A) = (I (x) A - A^T (x) I) vec(G0);  vec(B Y0) = (I (x) B) vec(Y0)
        system.block(row, 0, n2, n2) = kron(ident, md.A) - kron(md.A.transpose(), ident);
        system.block(row, n2 + k * m * n, n2, m * n) = kron(ident, md.B);
        rhs.segment(row, n2) = vec(md.A);
        // vec(G0 B) = (B^T (x) I) vec(G0)
        system.block(row + n2, 0, n * m, n2) = kron(md.B.transpose(), ident);
    }

    Eigen::BDCSVD<Matrix> svd(system, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    const Vector z = svd.solve(rhs);

    HomogenizationLeastSquares out;
    out.unknowns = unknowns;
    out.rank = svd.rank();
    out.relative_residual = (system * z - rhs).norm() / std::max(1.0, rhs.norm());
    out.G0 = unvec(z.head(n2), n, n);
    for (Eigen::Index k = 0; k < modes; ++k) out.Y0.push_back(unvec(z.segment(n2 + k * m * n, m * n), m, n));
    return out;
}

DegreeWindow admissible_degrees(const Matrix& G0) {
    DegreeWindow w;
    w.lower = -1.0;
    w.lower_inclusive = true;
    w.upper = std::numeric_limits<double>::infinity();
    for (double re : spectrum(G0).eigenvalue_real_parts) {
        if (re < 0.0) {
            w.upper = std::min(w.upper, -1.0 / re);
        } else if (re > 0.0) {
            const double bound = -1.0 / re;
            if (bound >= w.lower) {
                w.lower = bound;
                w.lower_inclusive = false;
            }
        }
    }
    return w;
}

HomogenizationResult solve_homogenization(const SwitchedPlant& plant, double mu, const HomogenizationOptions& opts) {
    if (!std::isfinite(mu) || mu < -1.0) {
        throw PreconditionError("solve_homogenization: degree mu must lie in [-1, inf), got " + std::to_string(mu));
    }
    const Eigen::Index n = plant.n();
    const Matrix ident = Matrix::Identity(n, n);

    HomogenizationLeastSquares lsq = homogenization_least_squares(plant);
    if (lsq.relative_residual > opts.infeasibility_tol) {
        std::ostringstream msg;
        msg << "solve_homogenization: no common (G0, Y0) exists; relative least-squares residual "
            << lsq.relative_residual << " exceeds " << opts.infeasibility_tol;
        throw InfeasibleError(msg.str(), std::nullopt, lsq.relative_residual);
    }

    HomogenizationResult res;
    res.mu = mu;
    res.G0 = std::move(lsq.G0);
    res.Y0 = std::move(lsq.Y0);
    res.residuals.relative_lsq = lsq.relative_residual;
    res.admissible = admissible_degrees(res.G0);

    const Matrix shifted = res.G0 - ident;
    Eigen::JacobiSVD<Matrix> svd(shifted);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    res.cond_G0_minus_I = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    if (!(res.cond_G0_minus_I <= opts.max_condition)) {
        throw NumericalError("solve_homogenization: G0 - I is numerically singular (cond " +
                             std::to_string(res.cond_G0_minus_I) + ")");
    }

    res.Gd = ident + mu * res.G0;
    const auto ah = is_anti_hurwitz(res.Gd);
    if (!ah.anti_hurwitz) {
        std::ostringstream msg;
        msg << "solve_homogenization: Gd = I + mu*G0 is not anti-Hurwitz at mu = " << mu
            << " (min Re eig " << ah.spectrum.min_real << "); admissible mu in " << (res.admissible.lower_inclusive ? "[" : "(")
            << res.admissible.lower << ", " << res.admissible.upper << ")";
        throw PreconditionError(msg.str());
    }

    const Eigen::PartialPivLU<Matrix> shifted_t_lu(shifted.transpose());
    double scale = 1.0;
    for (std::size_t k = 0; k < plant.mode_count(); ++k) {
        const Mode& md = plant.mode(k);
        // K0 = Y0 (G0 - I)^{-1}  <=>  (G0 - I)^T K0^T = Y0^T
        Matrix k0 = shifted_t_lu.solve(res.Y0[k].transpose()).transpose();
        Matrix a0 = md.A + md.B * k0;
        res.residuals.sylvester.push_back((md.A * res.G0 - res.G0 * md.A + md.B * res.Y0[k] - md.A).norm());
        res.residuals.input_kernel.push_back((res.G0 * md.B).norm());
        res.residuals.degree.push_back((a0 * res.Gd - (res.Gd + mu * ident) * a0).norm());
        res.residuals.input_dilation.push_back((res.Gd * md.B - md.B).norm());
        scale = std::max({scale, md.A.norm(), md.B.norm(), a0.norm()});
        res.K0.push_back(std::move(k0));
        res.A0.push_back(std::move(a0));
    }

    const double tol = opts.infeasibility_tol * scale * std::max(1.0, res.G0.norm());
    for (std::size_t k = 0; k < plant.mode_count(); ++k) {
        const double worst = std::max({res.residuals.sylvester[k], res.residuals.input_kernel[k],
                                       res.residuals.degree[k], res.residuals.input_dilation[k]});
        if (worst > tol) {
            throw InfeasibleError("solve_homogenization: identity residual " + std::to_string(worst) +
                                      " in mode " + std::to_string(k + 1) + " exceeds tolerance",
                                  k, worst);
        }
        if (!is_nilpotent(res.A0[k], opts.nilpotency_tol)) {
            throw NumericalError("solve_homogenization: A0 of mode " + std::to_string(k + 1) + " is not nilpotent");
        }
    }
    return res;
}

CommutatorCheck check_commutator_degree(const Matrix& c, const Matrix& gd, double mu, double tol) {
    require_square(c, "check_commutator_degree(C)");
    if (gd.rows() != c.rows() || gd.cols() != c.cols()) {
        throw DimensionError("check_commutator_degree: C and Gd must have equal shapes");
    }
    CommutatorCheck out;
    out.residual = (c * gd - gd * c - mu * c).norm();
    out.pass = out.residual <= tol * std::max(1.0, c.norm());
    return out;
}

bool verify_dilation_of_input(const Matrix& gd, const Matrix& b, double tol) {
    require_square(gd, "verify_dilation_of_input(Gd)");
    if (b.rows() != gd.rows()) throw DimensionError("verify_dilation_of_input: B row count must match Gd");
    const double bscale = std::max(1.0, b.norm());
    if ((gd * b - b).norm() > tol * bscale) return false;
    for (double s : {-1.0, -0.3, 0.7, 1.0}) {
        const Matrix lhs = mat_exp(gd, s) * b;
        const Matrix rhs = std::exp(s) * b;
        if ((lhs - rhs).norm() > tol * std::max(1.0, rhs.norm())) return false;
    }
    return true;
}

}  // namespace homctl
