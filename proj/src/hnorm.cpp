#include "homctl/hnorm.hpp"

#include "homctl/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace homctl {

namespace {

constexpr double kMaxEigvecCondition = 1e4;

}  // namespace

DilationContext::DilationContext(Matrix gd, Matrix p) : gd_(std::move(gd)), p_(std::move(p)) {
    require_square(gd_, "DilationContext(Gd)");
    require_square(p_, "DilationContext(P)");
    if (gd_.rows() != p_.rows()) throw DimensionError("DilationContext: Gd and P must have equal order");
    if (!gd_.allFinite() || !p_.allFinite()) throw PreconditionError("DilationContext: non-finite entries");
    p_ = symmetrize(p_);
    if (!(min_eig_sym(p_) > 0.0)) throw PreconditionError("DilationContext: P is not positive definite");
    sym_ = symmetrize(p_ * gd_);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(sym_, p_, Eigen::EigenvaluesOnly);
    alpha_ = ges.eigenvalues().minCoeff();
    beta_ = ges.eigenvalues().maxCoeff();
    if (!(alpha_ > 0.0)) {
        throw PreconditionError("DilationContext: P Gd + Gd^T P is not positive definite (dilation not monotone)");
    }

    Eigen::ComplexEigenSolver<Matrix> ces(gd_);
    if (ces.info() == Eigen::Success) {
        vec_ = ces.eigenvectors();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vec_);
        const auto& sv = svd.singularValues();
        const double smin = sv[sv.size() - 1];
        if (smin > 0.0 && sv[0] / smin <= kMaxEigvecCondition) {
            vec_inv_ = vec_.inverse();
            lambda_ = ces.eigenvalues();
            fast_ = true;
        }
    }
}

Matrix DilationContext::dilation(double s) const {
    if (s == 0.0) return Matrix::Identity(dim(), dim());
    if (fast_) {
        const Eigen::VectorXcd e = (s * lambda_).array().exp();
        return (vec_ * e.asDiagonal() * vec_inv_).real();
    }
    return mat_exp(gd_, s);
}

Vector DilationContext::dilate(double s, const Vector& x) const {
    if (x.size() != dim()) throw DimensionError("DilationContext::dilate: state dimension mismatch");
    if (s == 0.0) return x;
    if (fast_) {
        const Eigen::VectorXcd c = vec_inv_ * x.cast<std::complex<double>>();
        const Eigen::VectorXcd e = (s * lambda_).array().exp();
        return (vec_ * e.cwiseProduct(c)).real();
    }
    return mat_exp(gd_, s) * x;
}

double DilationContext::p_norm(const Vector& x) const { return std::sqrt(std::max(0.0, x.dot(p_ * x))); }

class NormSolver {
public:
    NormSolver(const DilationContext& ctx, const Vector& x) : ctx_(ctx), x_(x) {
        if (ctx.fast_) coords_ = ctx.vec_inv_ * x.cast<std::complex<double>>();
    }

    Vector shrink(double s) const {
        if (ctx_.fast_) {
            const Eigen::VectorXcd e = (-s * ctx_.lambda_).array().exp();
            return (ctx_.vec_ * e.cwiseProduct(coords_)).real();
        }
        return mat_exp(ctx_.gd_, -s) * x_;
    }

    /// g(s) = ln ||d(-s) x||_P and its derivative.
    void eval(double s, double& g, double& dg, Vector& y) const {
        y = shrink(s);
        const Vector py = ctx_.p_ * y;
        const double q = y.dot(py);
        g = 0.5 * std::log(q);
        dg = -y.dot(ctx_.sym_ * y) / q;
    }

private:
    const DilationContext& ctx_;
    const Vector& x_;
    Eigen::VectorXcd coords_;
};

NormEvaluation evaluate_norm(const Vector& x, const DilationContext& ctx, double rel_tol, std::optional<double> hint) {
    if (x.size() != ctx.dim()) throw DimensionError("canonical_norm: state dimension mismatch");
    if (!x.allFinite()) throw PreconditionError("canonical_norm: state is not finite");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) throw PreconditionError("canonical_norm: rel_tol must lie in (0, 1e-2]");

    NormEvaluation out;
    const double r = ctx.p_norm(x);
    if (r == 0.0) return out;

    const NormSolver solver(ctx, x);
    const double lr = std::log(r);
    double lo = std::min(lr / ctx.alpha(), lr / ctx.beta());
    double hi = std::max(lr / ctx.alpha(), lr / ctx.beta());
    const double pad = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
    lo -= pad;
    hi += pad;

    double g = 0.0;
    double dg = 0.0;
    Vector y;
    // The bracket is exact in exact arithmetic; widen geometrically if rounding disagrees.
    double width = std::max(hi - lo, 1e-3);
    for (int expand = 0;; ++expand) {
        double glo = 0.0;
        double ghi = 0.0;
        solver.eval(lo, glo, dg, y);
        solver.eval(hi, ghi, dg, y);
        if (glo >= 0.0 && ghi <= 0.0) break;
        if (expand >= 60 || !std::isfinite(glo) || !std::isfinite(ghi)) {
            throw NumericalError("canonical_norm: bracket failure (dilation is not monotone in the P norm)");
        }
        if (glo < 0.0) lo -= width;
        if (ghi > 0.0) hi += width;
        width *= 2.0;
    }

    double s = (hint && *hint > lo && *hint < hi) ? *hint : 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        ++out.iterations;
        solver.eval(s, g, dg, y);
        if (g == 0.0) break;
        if (g > 0.0) lo = s; else hi = s;
        double next = s - g / dg;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - s);
        s = next;
        if (step <= 0.1 * rel_tol || hi - lo <= rel_tol) {
            solver.eval(s, g, dg, y);
            break;
        }
    }
    out.log_value = s;
    out.value = std::exp(s);
    out.projection = std::move(y);
    return out;
}

double canonical_norm(const Vector& x, const DilationContext& ctx, double rel_tol) {
    return evaluate_norm(x, ctx, rel_tol).value;
}

Vector projector(const Vector& x, const DilationContext& ctx, double rel_tol) {
    if (x.size() == ctx.dim() && x.allFinite() && ctx.p_norm(x) == 0.0) {
        throw PreconditionError("projector: undefined at x = 0");
    }
    return evaluate_norm(x, ctx, rel_tol).projection;
}

Eigen::RowVectorXd hnorm_gradient(const Vector& x, const DilationContext& ctx) {
    if (x.size() == ctx.dim() && x.allFinite() && ctx.p_norm(x) == 0.0) {
        throw PreconditionError("hnorm_gradient: undefined at x = 0");
    }
    const NormEvaluation ev = evaluate_norm(x, ctx, 1e-10);
    const Vector& pi = ev.projection;
    const double denom = pi.dot(ctx.P() * ctx.Gd() * pi);
    if (!(denom > 0.0)) throw NumericalError("hnorm_gradient: non-positive denominator (monotonicity violated)");
    const Matrix shrink = ctx.dilation(-ev.log_value);
    return ev.value * (pi.transpose() * ctx.P() * shrink) / denom;
}

}  // namespace homctl
