#include "homctl/sim.hpp"

#include "homctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace homctl {

namespace {

class Stepper {
public:
    Stepper(const SwitchedPlant& plant, const FeedbackLaw& law, const DisturbanceSpec& dist)
        : plant_(plant), law_(law), dist_(dist) {}

    Vector field(double t, const Vector& x, std::size_t sigma) {
        const Mode& md = plant_.mode(sigma);
        const auto ev = law_.evaluate(x, sigma, hint_);
        if (!ev.in_deadzone) hint_ = ev.log_V;
        Vector dx = md.A * x + md.B * ev.u;
        if (dist_.kind != DisturbanceKind::kNone) dx.noalias() += md.E * eval_disturbance(dist_, t, x, plant_.p());
        return dx;
    }

    Vector rk4(double t, const Vector& x, double dt, std::size_t sigma) {
        const Vector k1 = field(t, x, sigma);
        const Vector k2 = field(t + 0.5 * dt, x + 0.5 * dt * k1, sigma);
        const Vector k3 = field(t + 0.5 * dt, x + 0.5 * dt * k2, sigma);
        const Vector k4 = field(t + dt, x + dt * k3, sigma);
        return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    std::optional<double> hint_;

private:
    const SwitchedPlant& plant_;
    const FeedbackLaw& law_;
    const DisturbanceSpec& dist_;
};

}  // namespace

Trajectory integrate(const SwitchedPlant& plant, const Controller& controller, const SwitchingPolicy& policy,
                     const Vector& x0, double t_final, double h, const DisturbanceSpec& disturbance,
                     const SimOptions& opts) {
    if (!(h > 0.0 && h <= 1e-2)) throw PreconditionError("integrate: step h must lie in (0, 1e-2]");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw PreconditionError("integrate: t_final must be positive");
    if (x0.size() != plant.n()) throw DimensionError("integrate: x0 length differs from the state dimension");
    if (!x0.allFinite()) throw PreconditionError("integrate: x0 is not finite");
    if (controller.mode_count() != plant.mode_count()) {
        throw PreconditionError("integrate: controller and plant mode counts differ");
    }
    validate_policy(policy, plant.mode_count());
    validate_disturbance(disturbance, plant.p());

    const FeedbackLaw law(controller, opts.deadzone, opts.norm_rel_tol);
    Stepper stepper(plant, law, disturbance);
    const double mu = controller.mu;

    std::unique_ptr<DwellSupervisor> supervisor;
    std::vector<SwitchPoint> schedule;
    std::size_t next_idx = 0;
    std::size_t mode = 0;
    double next_switch = std::numeric_limits<double>::infinity();
    std::size_t next_mode = 0;
    if (policy.kind == SwitchingKind::kStateDependent) {
        supervisor = std::make_unique<DwellSupervisor>(controller, policy);
        mode = supervisor->current_mode();
        next_switch = supervisor->on_switch(0.0, x0);
        next_mode = supervisor->next_mode();
    } else {
        schedule = switch_times(policy, t_final);
        mode = mode_at(policy, 0.0);
        if (!schedule.empty()) {
            next_switch = schedule.front().time;
            next_mode = schedule.front().mode;
        }
    }

    Trajectory traj;
    traj.h = h;
    std::optional<double> record_hint;
    auto record = [&](double t, const Vector& x, std::size_t sigma) {
        const auto ev = law.evaluate(x, sigma, record_hint);
        double v = ev.V;
        if (ev.in_deadzone && x.squaredNorm() > 0.0) v = evaluate_norm(x, law.context(sigma), opts.norm_rel_tol).value;
        if (!ev.in_deadzone) record_hint = ev.log_V;
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.inputs.push_back(ev.u);
        traj.modes.push_back(sigma);
        traj.vnorm.push_back(v);
        return v;
    };

    Vector x = x0;
    double t = 0.0;
    std::size_t k = 0;
    double v = record(t, x, mode);
    const double eps = 1e-9 * h;
    while (t < t_final - eps) {
        double h_eff = h;
        const bool scaled = opts.scale_step_with_norm && mu > 0.0 && v > 1.0;
        if (scaled) h_eff = h * std::pow(v, -mu);
        double t_next = scaled ? t + h_eff : static_cast<double>(k + 1) * h;
        bool on_grid = !scaled;
        if (t_final - t_next <= eps) t_next = t_final;
        bool is_switch = false;
        if (next_switch < t_next - eps) {
            t_next = next_switch;
            on_grid = false;
            is_switch = true;
        } else if (std::abs(next_switch - t_next) <= eps) {
            is_switch = true;
        }

        x = stepper.rk4(t, x, t_next - t, mode);
        if (!x.allFinite() || x.norm() > opts.blowup_norm) {
            throw BlowUpError("integrate: state blew up after t = " + std::to_string(t), t, std::move(traj));
        }
        if (on_grid) ++k;
        t = t_next;
        if (scaled && t >= static_cast<double>(k) * h) k = static_cast<std::size_t>(std::floor(t / h));

        if (x.squaredNorm() > 0.0 && law.context(mode).p_norm(x) < opts.clamp) {
            x.setZero();
            if (!traj.clamp_time) traj.clamp_time = t;
        }
        if (is_switch) {
            traj.switches.push_back({t, mode, next_mode});
            mode = next_mode;
            if (supervisor) {
                supervisor->advance();
                next_switch = supervisor->on_switch(t, x);
                next_mode = supervisor->next_mode();
            } else {
                ++next_idx;
                if (next_idx < schedule.size()) {
                    next_switch = schedule[next_idx].time;
                    next_mode = schedule[next_idx].mode;
                } else {
                    next_switch = std::numeric_limits<double>::infinity();
                }
            }
        }
        v = record(t, x, mode);
    }
    return traj;
}

std::optional<double> settling_time(const Trajectory& traj, double threshold) {
    if (!(threshold > 0.0)) throw PreconditionError("settling_time: threshold must be positive");
    if (traj.empty()) return std::nullopt;
    if (traj.vnorm.back() > threshold) return std::nullopt;
    std::size_t k = traj.size() - 1;
    while (k > 0 && traj.vnorm[k - 1] <= threshold) --k;
    return traj.times[k];
}

ScalingCheck trajectory_scaling_check(const SwitchedPlant& plant, const Controller& controller,
                                      const SwitchingPolicy& policy, const Vector& x0, double s, double t_final,
                                      double h) {
    if (!(std::abs(s) <= 2.0)) throw PreconditionError("trajectory_scaling_check: |s| must be <= 2");
    const double stretch = std::exp(controller.mu * s);
    if (h * stretch > 1e-2) {
        throw PreconditionError("trajectory_scaling_check: h * e^(mu s) exceeds 1e-2; use a finer h");
    }
    const DilationContext ctx = controller.context(0);
    const Trajectory a = integrate(plant, controller, policy.scaled(stretch), ctx.dilate(s, x0), t_final, h);
    const Trajectory b = integrate(plant, controller, policy, x0, stretch * t_final, h * stretch);
    if (a.size() != b.size()) {
        throw NumericalError("trajectory_scaling_check: sample grids are not alignable; use a finer h");
    }
    ScalingCheck out;
    out.samples = a.size();
    out.tolerance = 1e-4 * (1.0 + ctx.p_norm(x0));
    const Matrix ds = ctx.dilation(s);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::abs(a.times[k] * stretch - b.times[k]) > 1e-9 * (1.0 + b.times[k])) {
            throw NumericalError("trajectory_scaling_check: sample grids are not alignable; use a finer h");
        }
        out.max_deviation = std::max(out.max_deviation, ctx.p_norm(a.states[k] - ds * b.states[k]));
    }
    out.pass = out.max_deviation <= out.tolerance;
    return out;
}

NearlyFixedTimeReport nearly_fixed_time_check(const SwitchedPlant& plant, const Controller& controller,
                                              const SwitchingPolicy& policy, const std::vector<double>& radii,
                                              const std::vector<double>& x0_scales, double t_final, double h,
                                              const Vector& direction, double slack) {
    if (!(controller.mu > 0.0)) throw PreconditionError("nearly_fixed_time_check: requires mu > 0");
    if (direction.size() != plant.n() || !(direction.norm() > 0.0)) {
        throw PreconditionError("nearly_fixed_time_check: direction must be a nonzero state");
    }
    NearlyFixedTimeReport rep;
    rep.bound_time = 1.0 / (controller.mu * controller.rho_min()) + slack;
    SimOptions opts;
    opts.scale_step_with_norm = true;
    for (double scale : x0_scales) {
        const Vector x0 = scale * direction / direction.norm();
        const Trajectory traj = integrate(plant, controller, policy, x0, t_final, h, DisturbanceSpec::none(), opts);
        for (double r : radii) {
            NearlyFixedTimeEntry e;
            e.x0_scale = scale;
            e.radius = r;
            e.reached = settling_time(traj, r);
            e.pass = e.reached && *e.reached <= rep.bound_time;
            rep.pass = rep.pass && e.pass;
            rep.entries.push_back(e);
        }
    }
    return rep;
}

}  // namespace homctl
