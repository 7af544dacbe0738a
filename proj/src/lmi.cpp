#include "homctl/lmi.hpp"

#include "homctl/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <random>

namespace homctl {

namespace {

struct AffineBlock {
    Matrix f0;
    std::vector<Matrix> fj;
    Eigen::Index size = 0;
    bool shifted = true;
};

Eigen::Index param_count(const MatrixUnknown& u) {
    return u.symmetric ? u.rows * (u.rows + 1) / 2 : u.rows * u.cols;
}

std::vector<Matrix> unpack(const std::vector<MatrixUnknown>& unknowns, const Vector& z) {
    std::vector<Matrix> out;
    out.reserve(unknowns.size());
    Eigen::Index k = 0;
    for (const auto& u : unknowns) {
        Matrix m = Matrix::Zero(u.rows, u.cols);
        if (u.symmetric) {
            for (Eigen::Index j = 0; j < u.cols; ++j) {
                for (Eigen::Index i = 0; i <= j; ++i) {
                    m(i, j) = z[k];
                    m(j, i) = z[k];
                    ++k;
                }
            }
        } else {
            for (Eigen::Index j = 0; j < u.cols; ++j) {
                for (Eigen::Index i = 0; i < u.rows; ++i) m(i, j) = z[k++];
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

Vector pack(const std::vector<MatrixUnknown>& unknowns, const std::vector<Matrix>& values) {
    if (values.size() != unknowns.size()) throw DimensionError("sdp_feasibility: start point has the wrong arity");
    std::vector<double> z;
    for (std::size_t k = 0; k < unknowns.size(); ++k) {
        const auto& u = unknowns[k];
        const Matrix& m = values[k];
        if (m.rows() != u.rows || m.cols() != u.cols) {
            throw DimensionError("sdp_feasibility: start value for '" + u.name + "' has the wrong shape");
        }
        for (Eigen::Index j = 0; j < u.cols; ++j) {
            for (Eigen::Index i = 0; i < (u.symmetric ? j + 1 : u.rows); ++i) z.push_back(m(i, j));
        }
    }
    return Eigen::Map<Vector>(z.data(), static_cast<Eigen::Index>(z.size()));
}

Matrix checked_eval(const LmiBlock& b, const std::vector<Matrix>& values) {
    Matrix f = b.map(values);
    if (f.rows() != f.cols() || f.rows() < 1) {
        throw DimensionError("sdp_feasibility: block '" + b.label + "' is not square");
    }
    if (!f.allFinite()) throw PreconditionError("sdp_feasibility: block '" + b.label + "' is not finite");
    const double asym = (f - f.transpose()).norm();
    if (asym > 1e-10 * std::max(1.0, f.norm())) {
        throw PreconditionError("sdp_feasibility: block '" + b.label + "' is not symmetric");
    }
    return symmetrize(f);
}

class Barrier {
public:
    Barrier(const std::vector<AffineBlock>& blocks, Eigen::Index nz, double radius)
        : blocks_(blocks), nz_(nz), r2_(radius * radius) {}

    Eigen::Index nu() const {
        Eigen::Index s = 1;
        for (const auto& b : blocks_) s += b.size;
        return s;
    }

    Matrix block_value(const AffineBlock& b, const Vector& w) const {
        Matrix g = b.f0;
        for (Eigen::Index j = 0; j < nz_; ++j) {
            if (w[j] != 0.0) g.noalias() += w[j] * b.fj[static_cast<std::size_t>(j)];
        }
        if (b.shifted) g.diagonal().array() -= w[nz_];
        return g;
    }

    /// Barrier value, or +inf outside the domain.
    double value(const Vector& w, double k) const {
        const double s = r2_ - w.head(nz_).squaredNorm();
        if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
        double phi = -k * w[nz_] - std::log(s);
        for (const auto& b : blocks_) {
            Eigen::LLT<Matrix> llt(block_value(b, w));
            if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
            const auto& l = llt.matrixL();
            double logdet = 0.0;
            for (Eigen::Index i = 0; i < b.size; ++i) {
                const double d = l(i, i);
                if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
                logdet += 2.0 * std::log(d);
            }
            phi -= logdet;
        }
        return std::isfinite(phi) ? phi : std::numeric_limits<double>::infinity();
    }

    void derivatives(const Vector& w, double k, Vector& grad, Matrix& hess) const {
        const Eigen::Index nw = nz_ + 1;
        grad = Vector::Zero(nw);
        hess = Matrix::Zero(nw, nw);
        grad[nz_] = -k;
        const double s = r2_ - w.head(nz_).squaredNorm();
        grad.head(nz_) += 2.0 * w.head(nz_) / s;
        hess.topLeftCorner(nz_, nz_).diagonal().array() += 2.0 / s;
        hess.topLeftCorner(nz_, nz_).noalias() += (4.0 / (s * s)) * w.head(nz_) * w.head(nz_).transpose();

        for (const auto& b : blocks_) {
            Eigen::LLT<Matrix> llt(block_value(b, w));
            const Eigen::Index bs = b.size;
            Matrix cols(bs * bs, nw);
            for (Eigen::Index j = 0; j <= nz_; ++j) {
                if (j == nz_ && !b.shifted) {
                    cols.col(j).setZero();
                    continue;
                }
                Matrix mj = (j < nz_) ? b.fj[static_cast<std::size_t>(j)] : Matrix(-Matrix::Identity(bs, bs));
                llt.matrixL().solveInPlace(mj);
                Matrix mt = mj.transpose();
                llt.matrixL().solveInPlace(mt);
                cols.col(j) = Eigen::Map<const Vector>(mt.data(), bs * bs);
            }
            for (Eigen::Index j = 0; j <= nz_; ++j) {
                double tr = 0.0;
                for (Eigen::Index i = 0; i < bs; ++i) tr += cols(i * bs + i, j);
                grad[j] -= tr;
            }
            hess.noalias() += cols.transpose() * cols;
        }
    }

private:
    const std::vector<AffineBlock>& blocks_;
    Eigen::Index nz_;
    double r2_;
};

}  // namespace

const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::kFeasible: return "feasible";
        case SdpStatus::kInfeasible: return "infeasible";
        case SdpStatus::kSolverFailure: return "solver-failure";
    }
    return "unknown";
}

SdpResult sdp_feasibility(const std::vector<MatrixUnknown>& unknowns, const std::vector<LmiBlock>& blocks,
                          const SdpOptions& opts) {
    if (blocks.empty()) throw PreconditionError("sdp_feasibility: no constraint blocks");
    if (!(opts.margin >= 0.0) || !(opts.radius > 0.0)) {
        throw PreconditionError("sdp_feasibility: margin must be >= 0 and radius > 0");
    }
    Eigen::Index nz = 0;
    for (const auto& u : unknowns) {
        if (u.rows < 1 || u.cols < 1 || (u.symmetric && u.rows != u.cols)) {
            throw DimensionError("sdp_feasibility: bad shape for unknown '" + u.name + "'");
        }
        nz += param_count(u);
    }

    // Extract the affine data of every block by evaluating at 0 and at the unit basis.
    std::vector<AffineBlock> data(blocks.size());
    const std::vector<Matrix> zero_values = unpack(unknowns, Vector::Zero(nz));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        data[i].f0 = checked_eval(blocks[i], zero_values);
        data[i].size = data[i].f0.rows();
        data[i].shifted = blocks[i].shifted;
        data[i].fj.reserve(static_cast<std::size_t>(nz));
    }
    for (Eigen::Index j = 0; j < nz; ++j) {
        Vector e = Vector::Zero(nz);
        e[j] = 1.0;
        const auto values = unpack(unknowns, e);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            Matrix fj = checked_eval(blocks[i], values);
            if (fj.rows() != data[i].size) {
                throw DimensionError("sdp_feasibility: block '" + blocks[i].label + "' changes size");
            }
            data[i].fj.push_back(fj - data[i].f0);
        }
    }
    {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector probe(nz);
        for (Eigen::Index j = 0; j < nz; ++j) probe[j] = normal(rng);
        const auto values = unpack(unknowns, probe);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            Matrix predicted = data[i].f0;
            double scale = 1.0 + data[i].f0.norm();
            for (Eigen::Index j = 0; j < nz; ++j) {
                predicted += probe[j] * data[i].fj[static_cast<std::size_t>(j)];
                scale += std::abs(probe[j]) * data[i].fj[static_cast<std::size_t>(j)].norm();
            }
            if ((checked_eval(blocks[i], values) - predicted).norm() > 1e-9 * scale) {
                throw PreconditionError("sdp_feasibility: block '" + blocks[i].label + "' is not affine");
            }
        }
    }

    const Barrier barrier(data, nz, opts.radius);
    const double nu = static_cast<double>(barrier.nu());

    Vector w = Vector::Zero(nz + 1);
    if (!opts.start.empty()) w.head(nz) = pack(unknowns, opts.start);
    double t0 = std::numeric_limits<double>::infinity();
    bool any_shifted = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Matrix f = checked_eval(blocks[i], unpack(unknowns, w.head(nz)));
        if (data[i].shifted) {
            t0 = std::min(t0, min_eig_sym(f));
            any_shifted = true;
        } else if (!(min_eig_sym(f) > 0.0)) {
            throw PreconditionError("sdp_feasibility: unshifted block '" + blocks[i].label +
                                    "' is not strictly feasible at the start point");
        }
    }
    if (!any_shifted) throw PreconditionError("sdp_feasibility: at least one block must carry the slack");
    if (!(w.head(nz).norm() < opts.radius)) throw PreconditionError("sdp_feasibility: start point outside the ball");
    w[nz] = t0 - 1.0;

    SdpResult res;
    auto finish = [&](SdpStatus status, double upper, std::string msg) {
        res.status = status;
        res.slack = w[nz];
        res.slack_upper_bound = upper;
        res.values = unpack(unknowns, w.head(nz));
        res.block_min_eig.clear();
        for (const auto& b : blocks) res.block_min_eig.push_back(min_eig_sym(symmetrize(b.map(res.values))));
        res.message = std::move(msg);
        return res;
    };

    const double target = opts.early_stop > 0.0 ? opts.early_stop * opts.margin : std::numeric_limits<double>::infinity();
    double k = 1.0 / std::max(1.0, std::abs(t0));
    Vector grad;
    Matrix hess;
    for (;;) {
        // Centering at parameter k.
        bool centered = false;
        for (int inner = 0; inner < 200; ++inner) {
            if (res.newton_steps >= opts.max_newton) {
                return finish(SdpStatus::kSolverFailure, w[nz] + nu / k, "Newton iteration budget exhausted");
            }
            barrier.derivatives(w, k, grad, hess);
            Eigen::LDLT<Matrix> ldlt(hess);
            Vector step = ldlt.solve(-grad);
            if (ldlt.info() != Eigen::Success || !step.allFinite()) {
                return finish(SdpStatus::kSolverFailure, w[nz] + nu / k, "singular Newton system");
            }
            const double decrement = -grad.dot(step);
            ++res.newton_steps;
            if (decrement < 0.0) {
                return finish(SdpStatus::kSolverFailure, w[nz] + nu / k, "Hessian lost positive definiteness");
            }
            if (decrement / 2.0 <= 1e-9) {
                centered = true;
                break;
            }
            const double phi = barrier.value(w, k);
            double alpha = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const Vector trial = w + alpha * step;
                if (barrier.value(trial, k) <= phi - 0.25 * alpha * decrement) {
                    w = trial;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) {
                centered = true;  // numerically at the center
                break;
            }
            if (w[nz] >= target) {
                return finish(SdpStatus::kFeasible, w[nz] + nu / k, "slack target reached");
            }
        }
        if (!centered) {
            return finish(SdpStatus::kSolverFailure, w[nz] + nu / k, "centering did not converge");
        }
        const double gap = nu / k;
        if (w[nz] + gap < opts.margin) {
            return finish(SdpStatus::kInfeasible, w[nz] + gap, "slack upper bound below margin");
        }
        if (gap <= opts.gap_tol * std::max(1.0, std::abs(w[nz])) && w[nz] >= opts.margin) {
            return finish(SdpStatus::kFeasible, w[nz] + gap, "converged");
        }
        k *= 8.0;
    }
}

}  // namespace homctl
