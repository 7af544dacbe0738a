#include "homctl/synthesis.hpp"

#include "homctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace homctl {

const char* to_string(ControllerKind k) { return k == ControllerKind::kCommon ? "common" : "multiple"; }

double Controller::rho_min() const {
    if (modes.empty()) throw PreconditionError("Controller::rho_min: controller has no modes");
    double r = modes.front().rho;
    for (const auto& g : modes) r = std::min(r, g.rho);
    return r;
}

DilationContext Controller::context(std::size_t sigma) const {
    if (sigma >= modes.size()) throw PreconditionError("Controller::context: mode index out of range");
    return DilationContext(Gd, kind == ControllerKind::kCommon ? modes.front().P : modes[sigma].P);
}

std::vector<DilationContext> Controller::contexts() const {
    std::vector<DilationContext> out;
    out.reserve(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) out.push_back(context(k));
    return out;
}

namespace {

Matrix decay_lhs(const Matrix& X, const Matrix& Y, const Matrix& A0, const Matrix& B, const Matrix& Gd, double rho) {
    const Matrix ax = A0 * X;
    const Matrix by = B * Y;
    const Matrix gx = Gd * X;
    return ax + ax.transpose() + by + by.transpose() + rho * (gx + gx.transpose());
}

struct ModeData {
    Matrix A0;
    Matrix B;
};

/// One shared X for every listed mode, with per-mode Y and rho. Maximizes the common slack t of
/// the decay, positivity and monotonicity blocks under X <= x_bound I.
SdpResult max_slack(const std::vector<ModeData>& modes, const std::vector<double>& rho, const Matrix& Gd,
                    const SynthesisOptions& opts, bool optimize) {
    const Eigen::Index n = Gd.rows();
    std::vector<MatrixUnknown> unknowns;
    unknowns.push_back({"X", n, n, true});
    for (std::size_t k = 0; k < modes.size(); ++k) {
        unknowns.push_back({"Y" + std::to_string(k + 1), modes[k].B.cols(), n, false});
    }
    std::vector<LmiBlock> blocks;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        blocks.push_back({"decay mode " + std::to_string(k + 1),
                          [&, k](const std::vector<Matrix>& v) {
                              return Matrix(-decay_lhs(v[0], v[k + 1], modes[k].A0, modes[k].B, Gd, rho[k]));
                          },
                          true, true});
    }
    blocks.push_back({"X > 0", [](const std::vector<Matrix>& v) { return v[0]; }, true, true});
    blocks.push_back({"Gd X + X Gd^T > 0",
                      [&](const std::vector<Matrix>& v) {
                          const Matrix gx = Gd * v[0];
                          return Matrix(gx + gx.transpose());
                      },
                      true, true});
    const double bound = opts.x_bound;
    blocks.push_back({"X <= bound I",
                      [n, bound](const std::vector<Matrix>& v) { return Matrix(bound * Matrix::Identity(n, n) - v[0]); },
                      false, false});
    const double ycap = opts.y_bound;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const Eigen::Index m = modes[k].B.cols();
        blocks.push_back({"|Y| <= cap mode " + std::to_string(k + 1),
                          [k, m, n, ycap](const std::vector<Matrix>& v) {
                              Matrix e = ycap * Matrix::Identity(m + n, m + n);
                              e.topRightCorner(m, n) = v[k + 1];
                              e.bottomLeftCorner(n, m) = v[k + 1].transpose();
                              return e;
                          },
                          false, false});
    }
    SdpOptions so;
    so.margin = opts.margin;
    so.seed = opts.seed;
    if (optimize) {
        so.early_stop = 0.0;
        so.gap_tol = 1e-6;
    }
    return sdp_feasibility(unknowns, blocks, so);
}

/// Among solutions keeping slack delta in every block, minimize the effort bound
/// k >= lambda_max(Y_s X^-1 Y_s^T) over the listed modes. Starts from a max-slack solution.
SdpResult min_effort(const std::vector<ModeData>& modes, const std::vector<double>& rho, const Matrix& Gd,
                     const SynthesisOptions& opts, const SdpResult& start) {
    const Eigen::Index n = Gd.rows();
    const double t_star = start.slack;
    const double delta = t_star >= 2.0 * opts.margin ? 0.5 * t_star : 0.5 * (t_star + opts.margin);
    const Matrix& x0 = start.values[0];
    double k_start = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const Matrix& y = start.values[k + 1];
        k_start = std::max(k_start, max_eig_sym(symmetrize(y * x0.ldlt().solve(y.transpose()))));
    }
    k_start = 2.0 * k_start + 1e-12;
    const double k_cap = 2.0 * k_start;

    std::vector<MatrixUnknown> unknowns;
    unknowns.push_back({"X", n, n, true});
    for (std::size_t k = 0; k < modes.size(); ++k) {
        unknowns.push_back({"Y" + std::to_string(k + 1), modes[k].B.cols(), n, false});
    }
    unknowns.push_back({"k", 1, 1, true});
    const std::size_t kidx = modes.size() + 1;
    const Matrix shift = delta * Matrix::Identity(n, n);

    std::vector<LmiBlock> blocks;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        blocks.push_back({"decay mode " + std::to_string(k + 1),
                          [&, k](const std::vector<Matrix>& v) {
                              return Matrix(-decay_lhs(v[0], v[k + 1], modes[k].A0, modes[k].B, Gd, rho[k]) - shift);
                          },
                          true, false});
        const Eigen::Index m = modes[k].B.cols();
        blocks.push_back({"effort mode " + std::to_string(k + 1),
                          [&, k, m](const std::vector<Matrix>& v) {
                              Matrix e(m + n, m + n);
                              e.topLeftCorner(m, m) = v[kidx](0, 0) * Matrix::Identity(m, m);
                              e.topRightCorner(m, n) = v[k + 1];
                              e.bottomLeftCorner(n, m) = v[k + 1].transpose();
                              e.bottomRightCorner(n, n) = v[0];
                              return e;
                          },
                          true, false});
    }
    blocks.push_back({"X > 0", [&](const std::vector<Matrix>& v) { return Matrix(v[0] - shift); }, true, false});
    blocks.push_back({"Gd X + X Gd^T > 0",
                      [&](const std::vector<Matrix>& v) {
                          const Matrix gx = Gd * v[0];
                          return Matrix(gx + gx.transpose() - shift);
                      },
                      true, false});
    const double bound = opts.x_bound;
    blocks.push_back({"X <= bound I",
                      [n, bound](const std::vector<Matrix>& v) { return Matrix(bound * Matrix::Identity(n, n) - v[0]); },
                      false, false});
    blocks.push_back({"effort cap", [k_cap, kidx](const std::vector<Matrix>& v) { return Matrix(k_cap - v[kidx].array()); },
                      false, true});

    SdpOptions so;
    so.margin = 0.0;
    so.seed = opts.seed;
    so.early_stop = 0.0;
    so.gap_tol = 1e-7;
    so.start = start.values;
    so.start.push_back(Matrix::Constant(1, 1, k_start));
    return sdp_feasibility(unknowns, blocks, so);
}

/// Synthesis solve: max-slack feasibility, then effort minimization at half the slack.
SdpResult solve_block(const std::vector<ModeData>& modes, const std::vector<double>& rho, const Matrix& Gd,
                      const SynthesisOptions& opts) {
    SdpResult first = max_slack(modes, rho, Gd, opts, true);
    if (first.status != SdpStatus::kFeasible) return first;
    SdpResult second = min_effort(modes, rho, Gd, opts, first);
    if (second.status == SdpStatus::kSolverFailure) return first;
    second.values.pop_back();
    second.status = SdpStatus::kFeasible;
    second.slack = first.slack;
    second.slack_upper_bound = first.slack_upper_bound;
    return second;
}

bool feasible_at(const std::vector<ModeData>& modes, double rho, const Matrix& Gd, const SynthesisOptions& opts) {
    const std::vector<double> r(modes.size(), rho);
    const SdpResult res = max_slack(modes, r, Gd, opts, false);
    if (res.status == SdpStatus::kSolverFailure) {
        throw NumericalError("synthesis: LMI solver failure at rho = " + std::to_string(rho) + ": " + res.message);
    }
    return res.status == SdpStatus::kFeasible;
}

/// Largest feasible rho by doubling then bisection, backed off by opts.rho_backoff.
double maximize_rho(const std::vector<ModeData>& modes, const Matrix& Gd, const SynthesisOptions& opts,
                    std::optional<std::size_t> mode) {
    double lo = 0.0;
    double hi = 0.0;
    if (feasible_at(modes, 1.0, Gd, opts)) {
        lo = 1.0;
        hi = 2.0;
        while (hi <= opts.rho_cap && feasible_at(modes, hi, Gd, opts)) {
            lo = hi;
            hi *= 2.0;
        }
        if (hi > opts.rho_cap) return opts.rho_backoff * lo;
    } else {
        hi = 1.0;
        lo = 0.5;
        while (lo >= opts.rho_lower && !feasible_at(modes, lo, Gd, opts)) {
            hi = lo;
            lo *= 0.5;
        }
        if (lo < opts.rho_lower) {
            if (!feasible_at(modes, opts.rho_lower, Gd, opts)) {
                throw InfeasibleError("synthesis: LMI infeasible for every rho >= " + std::to_string(opts.rho_lower), mode);
            }
            lo = opts.rho_lower;
        }
    }
    while ((hi - lo) > opts.rho_rel_width * lo) {
        const double mid = 0.5 * (lo + hi);
        if (feasible_at(modes, mid, Gd, opts)) lo = mid; else hi = mid;
    }
    return opts.rho_backoff * lo;
}

void check_homogenization(const SwitchedPlant& plant, const HomogenizationResult& homog) {
    if (homog.A0.size() != plant.mode_count() || homog.K0.size() != plant.mode_count()) {
        throw PreconditionError("synthesis: homogenization result does not match the plant's mode count");
    }
    if (homog.Gd.rows() != plant.n()) throw DimensionError("synthesis: Gd order differs from the plant state dimension");
    const auto& r = homog.residuals;
    const double tol = 1e-6 * std::max(1.0, homog.G0.norm());
    for (std::size_t k = 0; k < plant.mode_count(); ++k) {
        const double worst = std::max({r.sylvester.at(k), r.input_kernel.at(k), r.degree.at(k), r.input_dilation.at(k)});
        if (worst > tol) {
            throw PreconditionError("synthesis: homogenization residuals too large in mode " + std::to_string(k + 1));
        }
    }
}

std::vector<ModeData> mode_data(const SwitchedPlant& plant, const HomogenizationResult& homog) {
    std::vector<ModeData> out;
    for (std::size_t k = 0; k < plant.mode_count(); ++k) out.push_back({homog.A0[k], plant.mode(k).B});
    return out;
}

double checked_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw PreconditionError("synthesis: decay rate rho must be positive and finite");
    }
    return rho;
}

ModeGains make_gains(const Matrix& X, const Matrix& Y, const ModeData& md, const Matrix& K0, const Matrix& Gd,
                     double rho, double margin) {
    ModeGains g;
    g.X = symmetrize(X);
    g.P = symmetrize(g.X.inverse());
    g.Y = Y;
    g.K = Y * g.P;
    g.K0 = K0;
    g.rho = rho;
    g.k_tilde = control_effort_bound(g.X, g.K);
    g.certificate = certify_lmi(g.X, g.Y, md.A0, md.B, Gd, rho, margin);
    return g;
}

}  // namespace

LmiCertificate certify_lmi(const Matrix& X, const Matrix& Y, const Matrix& A0, const Matrix& B, const Matrix& Gd,
                           double rho, double margin) {
    LmiCertificate c;
    c.margin = margin;
    const Matrix xs = symmetrize(X);
    c.lmi_min_eig = min_eig_sym(symmetrize(-decay_lhs(xs, Y, A0, B, Gd, rho)));
    const Matrix gx = Gd * xs;
    c.dilation_min_eig = min_eig_sym(symmetrize(gx + gx.transpose()));
    c.x_min_eig = min_eig_sym(xs);
    c.scale = std::max(max_eig_sym(xs), 0.0);
    const double need = margin * c.scale;
    c.pass = c.x_min_eig > 0.0 && c.lmi_min_eig >= need && c.dilation_min_eig >= need && c.x_min_eig >= need;
    return c;
}

Controller synthesize_common(const SwitchedPlant& plant, const HomogenizationResult& homog, RhoSpec rho,
                             const SynthesisOptions& opts) {
    check_homogenization(plant, homog);
    const auto modes = mode_data(plant, homog);
    const double r = std::holds_alternative<AutoRho>(rho) ? maximize_rho(modes, homog.Gd, opts, std::nullopt)
                                                           : checked_rho(std::get<double>(rho));
    const std::vector<double> rs(modes.size(), r);
    const SdpResult res = solve_block(modes, rs, homog.Gd, opts);
    if (res.status == SdpStatus::kInfeasible) {
        throw InfeasibleError("synthesize_common: LMI infeasible at rho = " + std::to_string(r), std::nullopt,
                              res.slack_upper_bound);
    }
    if (res.status == SdpStatus::kSolverFailure) {
        throw NumericalError("synthesize_common: LMI solver failure: " + res.message);
    }
    Controller c;
    c.kind = ControllerKind::kCommon;
    c.mu = homog.mu;
    c.Gd = homog.Gd;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        c.modes.push_back(make_gains(res.values[0], res.values[k + 1], modes[k], homog.K0[k], homog.Gd, r, opts.margin));
    }
    return c;
}

Controller synthesize_multiple(const SwitchedPlant& plant, const HomogenizationResult& homog,
                               const std::vector<RhoSpec>& rho, const SynthesisOptions& opts) {
    check_homogenization(plant, homog);
    const auto modes = mode_data(plant, homog);
    if (!rho.empty() && rho.size() != 1 && rho.size() != modes.size()) {
        throw PreconditionError("synthesize_multiple: expected one rho per mode");
    }
    Controller c;
    c.kind = ControllerKind::kMultiple;
    c.mu = homog.mu;
    c.Gd = homog.Gd;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const RhoSpec spec = rho.empty() ? RhoSpec(AutoRho{}) : rho[rho.size() == 1 ? 0 : k];
        const std::vector<ModeData> one{modes[k]};
        const double r = std::holds_alternative<AutoRho>(spec) ? maximize_rho(one, homog.Gd, opts, k)
                                                                : checked_rho(std::get<double>(spec));
        const SdpResult res = solve_block(one, {r}, homog.Gd, opts);
        if (res.status == SdpStatus::kInfeasible) {
            throw InfeasibleError("synthesize_multiple: LMI of mode " + std::to_string(k + 1) +
                                      " infeasible at rho = " + std::to_string(r),
                                  k, res.slack_upper_bound);
        }
        if (res.status == SdpStatus::kSolverFailure) {
            throw NumericalError("synthesize_multiple: LMI solver failure in mode " + std::to_string(k + 1) + ": " +
                                 res.message);
        }
        c.modes.push_back(make_gains(res.values[0], res.values[1], modes[k], homog.K0[k], homog.Gd, r, opts.margin));
    }
    c.gamma = estimate_gamma(c, opts.samples, opts.seed);
    const auto eq = estimate_c1_c2(c, opts.samples, opts.seed);
    c.c1 = eq.c1;
    c.c2 = eq.c2;
    return c;
}

double control_effort_bound(const Matrix& X, const Matrix& K) {
    require_square(X, "control_effort_bound(X)");
    if (K.cols() != X.rows()) throw DimensionError("control_effort_bound: K must have as many columns as X has rows");
    if (!(min_eig_sym(X) > 0.0)) throw PreconditionError("control_effort_bound: X is not positive definite");
    const Matrix r = sqrt_spd(symmetrize(X));
    const Matrix kr = K * r;
    return std::sqrt(std::max(0.0, max_eig_sym(symmetrize(kr.transpose() * kr))));
}

namespace {

constexpr double kSafety = 1.05;

Vector sphere_sample(std::mt19937_64& rng, const Matrix& P) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector u(P.rows());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = normal(rng);
    double r = std::sqrt(u.dot(P * u));
    while (!(r > 0.0)) {
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = normal(rng);
        r = std::sqrt(u.dot(P * u));
    }
    return u / r;
}

}  // namespace

double estimate_gamma(const Controller& controller, std::size_t samples, std::uint64_t seed) {
    if (controller.kind != ControllerKind::kMultiple) {
        throw PreconditionError("estimate_gamma: requires a multiple-kind controller");
    }
    const double expo = controller.mu == 0.0 ? 1.0 : std::abs(controller.mu);
    const auto ctx = controller.contexts();
    std::mt19937_64 rng(seed);
    double worst = 1.0;
    for (std::size_t i = 0; i < samples; ++i) {
        for (std::size_t a = 0; a < ctx.size(); ++a) {
            const Vector x = sphere_sample(rng, ctx[a].P());
            for (std::size_t b = 0; b < ctx.size(); ++b) {
                if (a == b) continue;
                worst = std::max(worst, std::pow(canonical_norm(x, ctx[b]), expo));
            }
        }
    }
    return std::max(1.0, kSafety * worst);
}

NormEquivalence estimate_c1_c2(const Controller& controller, std::size_t samples, std::uint64_t seed) {
    if (controller.kind != ControllerKind::kMultiple) {
        throw PreconditionError("estimate_c1_c2: requires a multiple-kind controller");
    }
    const auto ctx = controller.contexts();
    std::mt19937_64 rng(seed);
    double lo = 1.0;
    double hi = 1.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const Vector x = sphere_sample(rng, ctx.front().P());
        for (std::size_t b = 1; b < ctx.size(); ++b) {
            const double v = canonical_norm(x, ctx[b]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo / kSafety, hi * kSafety};
}

double adt_bound(double gamma, double rho_min) {
    if (!(gamma >= 1.0) || !(rho_min > 0.0)) throw PreconditionError("adt_bound: need gamma >= 1 and rho_min > 0");
    return std::log(gamma) / rho_min;
}

double min_dwell_ft(double gamma, double rho_min, double mu, double V0) {
    if (!(mu < 0.0) || !(gamma > 1.0) || !(rho_min > 0.0) || !(V0 >= 0.0)) {
        throw PreconditionError("min_dwell_ft: need mu < 0, gamma > 1, rho_min > 0, V0 >= 0");
    }
    if (V0 == 0.0) return 0.0;
    return -(gamma - 1.0) / (mu * gamma * rho_min) * std::pow(V0, -mu);
}

double sddt_tau_from(double ref_norm, double mu, double gamma, double c1, double c2, double rho_min) {
    if (mu == 0.0) throw PreconditionError("sddt_tau: undefined for mu = 0");
    if (!(rho_min > 0.0) || !(c1 > 0.0) || !(c2 >= c1) || !(gamma >= 1.0)) {
        throw PreconditionError("sddt_tau: need rho_min > 0, 0 < c1 <= c2, gamma >= 1");
    }
    if (ref_norm == 0.0) return 0.0;
    const double scale = std::pow(ref_norm, -mu);
    if (mu < 0.0) return scale * (std::pow(c2, -mu) - std::pow(c1, -mu) / gamma) / (-mu * rho_min);
    return scale * (gamma * std::pow(c1, -mu) - std::pow(c2, -mu)) / (mu * rho_min);
}

double sddt_tau(const Controller& controller, const Vector& x_at_switch) {
    if (controller.kind != ControllerKind::kMultiple || !controller.gamma || !controller.c1 || !controller.c2) {
        throw PreconditionError("sddt_tau: requires a multiple-kind controller with gamma, c1 and c2");
    }
    const double ref = canonical_norm(x_at_switch, controller.context(0));
    return sddt_tau_from(ref, controller.mu, *controller.gamma, *controller.c1, *controller.c2, controller.rho_min());
}

Controller controller_from_gains(double mu, const Matrix& gd, const std::vector<Matrix>& P, const std::vector<Matrix>& K,
                                 const std::vector<Matrix>& K0, const std::vector<double>& rho) {
    const std::size_t n_modes = P.size();
    if (n_modes == 0 || K.size() != n_modes || K0.size() != n_modes || rho.size() != n_modes) {
        throw PreconditionError("controller_from_gains: P, K, K0 and rho must list every mode");
    }
    Controller c;
    c.kind = ControllerKind::kMultiple;
    c.mu = mu;
    c.Gd = gd;
    for (std::size_t k = 0; k < n_modes; ++k) {
        if (P[k].rows() != gd.rows() || K[k].cols() != gd.rows() || K0[k].cols() != gd.rows()) {
            throw DimensionError("controller_from_gains: gain shapes do not match Gd");
        }
        ModeGains g;
        g.P = symmetrize(P[k]);
        g.X = symmetrize(g.P.inverse());
        g.K = K[k];
        g.Y = g.K * g.X;
        g.K0 = K0[k];
        g.rho = checked_rho(rho[k]);
        g.k_tilde = control_effort_bound(g.X, g.K);
        c.modes.push_back(std::move(g));
    }
    return c;
}

}  // namespace homctl
