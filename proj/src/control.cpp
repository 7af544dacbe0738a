#include "homctl/control.hpp"

#include "homctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace homctl {

FeedbackLaw::FeedbackLaw(const Controller& controller, double deadzone, double rel_tol)
    : controller_(controller), contexts_(controller.contexts()), deadzone_(deadzone), rel_tol_(rel_tol) {}

const DilationContext& FeedbackLaw::context(std::size_t sigma) const {
    if (sigma >= contexts_.size()) {
        throw PreconditionError("control: mode index " + std::to_string(sigma + 1) + " out of range");
    }
    return contexts_[sigma];
}

FeedbackLaw::Evaluation FeedbackLaw::evaluate(const Vector& x, std::size_t sigma, std::optional<double> hint) const {
    const DilationContext& ctx = context(sigma);
    const ModeGains& g = controller_.modes[sigma];
    if (x.size() != ctx.dim()) throw DimensionError("control_input: state dimension mismatch");
    Evaluation out;
    out.u = g.K0 * x;
    if (ctx.p_norm(x) < deadzone_) return out;
    const NormEvaluation ev = evaluate_norm(x, ctx, rel_tol_, hint);
    out.V = ev.value;
    out.log_V = ev.log_value;
    out.in_deadzone = false;
    out.u.noalias() += std::exp((1.0 + controller_.mu) * ev.log_value) * (g.K * ev.projection);
    return out;
}

Vector control_input(const Vector& x, std::size_t sigma, const Controller& controller) {
    return FeedbackLaw(controller).evaluate(x, sigma).u;
}

double disturbance_margin(const Vector& x, const Vector& omega, const DilationContext& ctx, const Matrix& E, double mu) {
    if (omega.size() != E.cols()) throw DimensionError("disturbance_margin: omega length differs from p");
    if (ctx.p_norm(x) == 0.0) throw PreconditionError("disturbance_margin: undefined at x = 0");
    const NormEvaluation ev = evaluate_norm(x, ctx, 1e-10);
    const Vector& pi = ev.projection;
    const double den = pi.dot(ctx.P() * ctx.Gd() * pi);
    if (!(den > 0.0)) throw NumericalError("disturbance_margin: non-positive denominator (monotonicity violated)");
    const double num = pi.dot(ctx.P() * ctx.dilate(-ev.log_value, E * omega));
    return num / den * std::exp(-mu * ev.log_value);
}

double disturbance_margin(const Vector& x, double /*t*/, const Vector& omega, std::size_t sigma,
                          const Controller& controller, const SwitchedPlant& plant) {
    return disturbance_margin(x, omega, controller.context(sigma), plant.mode(sigma).E, controller.mu);
}

double matched_kappa_floor(const Controller& controller, const SwitchedPlant& plant, double omega_bound,
                           double kappa_target, std::size_t samples, std::uint64_t seed) {
    if (controller.mode_count() != plant.mode_count()) {
        throw PreconditionError("matched_kappa_floor: controller and plant mode counts differ");
    }
    if (!(kappa_target > 0.0) || !(omega_bound >= 0.0)) {
        throw PreconditionError("matched_kappa_floor: need kappa_target > 0 and omega_bound >= 0");
    }
    if (!(controller.mu > -1.0)) throw PreconditionError("matched_kappa_floor: requires mu > -1");
    if (samples == 0) throw PreconditionError("matched_kappa_floor: samples must be positive");
    const auto contexts = controller.contexts();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    double c_e = 0.0;
    for (std::size_t k = 0; k < plant.mode_count(); ++k) {
        const Matrix& e = plant.mode(k).E;
        const DilationContext& ctx = contexts[k];
        if ((ctx.Gd() * e - e).norm() > 1e-8 * std::max(1.0, e.norm())) {
            throw PreconditionError("matched_kappa_floor: Gd E != E in mode " + std::to_string(k + 1));
        }
        const Matrix ept = e.transpose() * ctx.P();
        const Matrix pgd = ctx.P() * ctx.Gd();
        for (std::size_t i = 0; i < samples; ++i) {
            Vector x(ctx.dim());
            for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = g(rng);
            const Vector pi = x / ctx.p_norm(x);
            c_e = std::max(c_e, (ept * pi).norm() / pi.dot(pgd * pi));
        }
    }
    return std::pow(c_e * omega_bound / kappa_target, 1.0 / (1.0 + controller.mu));
}

DecayReport decay_rate_check(const Trajectory& traj, const Controller& controller, double eta_expected, double slack) {
    DecayReport rep;
    rep.eta_expected = eta_expected;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const std::size_t n = traj.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (traj.times[k + 1] - traj.times[k] > 1e-3 * (1.0 + 1e-9)) {
            throw PreconditionError("decay_rate_check: trajectory too coarse (step > 1e-3)");
        }
    }
    const auto contexts = controller.contexts();
    const double mu = controller.mu;
    std::vector<double> v(n, 0.0);
    std::optional<double> hint;
    for (std::size_t k = 0; k < n; ++k) {
        const DilationContext& ctx = contexts.at(traj.modes[k]);
        if (ctx.p_norm(traj.states[k]) < kDefaultDeadzone) {
            hint.reset();
            continue;
        }
        const NormEvaluation ev = evaluate_norm(traj.states[k], ctx, 1e-10, hint);
        v[k] = ev.value;
        hint = ev.log_value;
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (traj.modes[k] != traj.modes[k + 1] || v[k] == 0.0 || v[k + 1] == 0.0) continue;
        const double dt = traj.times[k + 1] - traj.times[k];
        if (!(dt > 0.0)) continue;
        const double avg = 0.5 * (std::pow(v[k], 1.0 + mu) + std::pow(v[k + 1], 1.0 + mu));
        const double margin = (v[k] - v[k + 1]) / dt - eta_expected * avg + slack * std::max(1.0, avg);
        ++rep.intervals_checked;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_time = traj.times[k];
        }
    }
    if (rep.intervals_checked == 0) rep.worst_margin = 0.0;
    rep.pass = rep.worst_margin >= 0.0;
    return rep;
}

}  // namespace homctl
