#include "homctl/linalg.hpp"

#include "homctl/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace homctl {

namespace {

// Pade coefficients and switching thresholds for the 1-norm (Higham, 2005).
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                           30270240.0,    2162160.0,    110880.0,     3960.0,
                                           90.0,          1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double norm1(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

template <std::size_t N>
void low_order_uv(const Matrix& a, const std::array<double, N>& b, Matrix& u, Matrix& v) {
    const Eigen::Index n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    Matrix odd = b[1] * ident;
    Matrix even = b[0] * ident;
    Matrix power = ident;
    for (std::size_t k = 2; k < N; k += 2) {
        power = power * a2;
        even += b[k] * power;
        if (k + 1 < N) odd += b[k + 1] * power;
    }
    u = a * odd;
    v = even;
}

void pade13_uv(const Matrix& a, Matrix& u, Matrix& v) {
    const auto& b = kPade13;
    const Eigen::Index n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
    u = a * (inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
    const Matrix inner_v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
    v = inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
}

}  // namespace

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw DimensionError(std::string(what) + ": expected a nonempty square matrix, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix mat_exp(const Matrix& m, double s) {
    require_square(m, "mat_exp");
    const Eigen::Index n = m.rows();
    if (s == 0.0) return Matrix::Identity(n, n);
    if (!m.allFinite() || !std::isfinite(s)) throw PreconditionError("mat_exp: non-finite input");

    Matrix a = s * m;
    const double anorm = norm1(a);
    Matrix u(n, n), v(n, n);
    int squarings = 0;
    if (anorm <= kTheta3) {
        low_order_uv(a, kPade3, u, v);
    } else if (anorm <= kTheta5) {
        low_order_uv(a, kPade5, u, v);
    } else if (anorm <= kTheta7) {
        low_order_uv(a, kPade7, u, v);
    } else if (anorm <= kTheta9) {
        low_order_uv(a, kPade9, u, v);
    } else {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(anorm / kTheta13))));
        a /= std::ldexp(1.0, squarings);
        pade13_uv(a, u, v);
    }
    Matrix result = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

SpectrumSummary spectrum(const Matrix& m) {
    require_square(m, "spectrum");
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) throw NumericalError("spectrum: eigenvalue iteration failed");
    SpectrumSummary out;
    const auto& ev = solver.eigenvalues();
    out.eigenvalue_real_parts.reserve(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) out.eigenvalue_real_parts.push_back(ev[i].real());
    const auto [lo, hi] = std::minmax_element(out.eigenvalue_real_parts.begin(),
                                              out.eigenvalue_real_parts.end());
    out.min_real = *lo;
    out.max_real = *hi;
    return out;
}

AntiHurwitzResult is_anti_hurwitz(const Matrix& m, double margin) {
    AntiHurwitzResult out;
    out.spectrum = spectrum(m);
    out.anti_hurwitz = out.spectrum.min_real > margin;
    return out;
}

bool is_nilpotent(const Matrix& m, double tol) {
    require_square(m, "is_nilpotent");
    const Eigen::Index n = m.rows();
    const double fro = m.norm();
    if (fro == 0.0) return true;

    // tr(M^k) = 0 for k = 1..n characterizes nilpotency exactly and is linear in perturbations.
    const double scale = std::max(1.0, fro);
    Matrix power = m;
    double scale_k = scale;
    for (Eigen::Index k = 1;; ++k) {
        if (std::abs(power.trace()) > tol * static_cast<double>(n) * scale_k) return false;
        if (k == n) break;
        power = power * m;
        scale_k *= scale;
    }
    const bool power_test = power.norm() <= tol * std::max(1.0, std::pow(fro, static_cast<double>(n)));

    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) return false;
    const double modulus_bound = std::pow(tol, 1.0 / static_cast<double>(n)) * std::max(1.0, fro);
    const bool spectrum_test = solver.eigenvalues().cwiseAbs().maxCoeff() <= modulus_bound;

    return power_test && spectrum_test;
}

bool kalman_controllable(const Matrix& a, const Matrix& b) {
    require_square(a, "kalman_controllable(A)");
    if (b.rows() != a.rows() || b.cols() < 1) {
        throw DimensionError("kalman_controllable: B must have " + std::to_string(a.rows()) +
                             " rows, got " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    const Eigen::Index n = a.rows();
    const Eigen::Index m = b.cols();
    Matrix ctrb(n, n * m);
    Matrix block = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        ctrb.middleCols(k * m, m) = block;
        block = a * block;
    }
    Eigen::JacobiSVD<Matrix> svd(ctrb);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return false;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > 1e-10 * sv[0]) ++rank;
    }
    return rank == n;
}

namespace {
Eigen::SelfAdjointEigenSolver<Matrix> sym_eigen(const Matrix& m, const char* what) {
    require_square(m, what);
    const double scale = std::max(1.0, m.norm());
    if ((m - m.transpose()).norm() > 1e-10 * scale) {
        throw PreconditionError(std::string(what) + ": matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError(std::string(what) + ": eigen solver failed");
    return solver;
}
}  // namespace

double min_eig_sym(const Matrix& m) { return sym_eigen(m, "min_eig_sym").eigenvalues().minCoeff(); }

double max_eig_sym(const Matrix& m) { return sym_eigen(m, "max_eig_sym").eigenvalues().maxCoeff(); }

Matrix sqrt_spd(const Matrix& m) {
    require_square(m, "sqrt_spd");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m));
    if (solver.info() != Eigen::Success) throw NumericalError("sqrt_spd: eigen solver failed");
    if (solver.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff())) {
        throw PreconditionError("sqrt_spd: matrix is not positive semidefinite");
    }
    const Vector root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Eigen::Ref<const Vector>& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) throw DimensionError("unvec: size mismatch");
    Matrix out(rows, cols);
    Eigen::Map<Vector>(out.data(), out.size()) = v;
    return out;
}

}  // namespace homctl
