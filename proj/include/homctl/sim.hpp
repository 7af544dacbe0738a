#pragma once

#include "homctl/control.hpp"
#include "homctl/error.hpp"
#include "homctl/plant.hpp"
#include "homctl/switching.hpp"
#include "homctl/synthesis.hpp"
#include "homctl/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace homctl {

struct SimOptions {
    double deadzone = kDefaultDeadzone;
    double clamp = 1e-12;        ///< states with ||x||_P below this are set to 0
    double norm_rel_tol = 1e-8;
    /// Shrink the step to h * min(1, V^-mu) for mu > 0 so that very large states stay resolved.
    bool scale_step_with_norm = false;
    double blowup_norm = 1e150;
};

/// Integration aborted on a non-finite or exploding state.
class BlowUpError : public NumericalError {
public:
    BlowUpError(const std::string& what, double last_time, Trajectory partial)
        : NumericalError(what), last_time_(last_time), partial_(std::move(partial)) {}
    double last_time() const noexcept { return last_time_; }
    const Trajectory& partial() const noexcept { return partial_; }

private:
    double last_time_;
    Trajectory partial_;
};

/// Classic RK4 on dx/dt = A x + B u(x) + E w(t, x) on the grid t_k = k h, with extra samples at
/// switch instants. The state-dependent policy kind runs the dwell-time supervisor.
Trajectory integrate(const SwitchedPlant& plant, const Controller& controller, const SwitchingPolicy& policy,
                     const Vector& x0, double t_final, double h,
                     const DisturbanceSpec& disturbance = DisturbanceSpec::none(), const SimOptions& opts = {});

/// First time after which vnorm stays <= threshold, or nullopt.
std::optional<double> settling_time(const Trajectory& traj, double threshold);

struct ScalingCheck {
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::size_t samples = 0;
};

/// Compares x(t; d(s) x0, sigma_s) with d(s) x(e^(mu s) t; x0, sigma) sample by sample.
ScalingCheck trajectory_scaling_check(const SwitchedPlant& plant, const Controller& controller,
                                      const SwitchingPolicy& policy, const Vector& x0, double s, double t_final,
                                      double h);

struct NearlyFixedTimeEntry {
    double x0_scale = 0.0;
    double radius = 0.0;
    std::optional<double> reached;  ///< settling time into the radius
    bool pass = false;
};

struct NearlyFixedTimeReport {
    double bound_time = 0.0;  ///< 1/(mu rho_min) + slack
    std::vector<NearlyFixedTimeEntry> entries;
    bool pass = true;
};

/// x0 = scale * direction / ||direction||; each run must enter every radius by bound_time.
NearlyFixedTimeReport nearly_fixed_time_check(const SwitchedPlant& plant, const Controller& controller,
                                              const SwitchingPolicy& policy, const std::vector<double>& radii,
                                              const std::vector<double>& x0_scales, double t_final, double h,
                                              const Vector& direction, double slack = 0.05);

}  // namespace homctl
