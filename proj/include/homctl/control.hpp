#pragma once

#include "homctl/hnorm.hpp"
#include "homctl/plant.hpp"
#include "homctl/synthesis.hpp"
#include "homctl/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace homctl {

constexpr double kDefaultDeadzone = 1e-9;

/// Homogeneous feedback u = K0 x + V^(1+mu) K pi(x) with cached dilation contexts.
class FeedbackLaw {
public:
    explicit FeedbackLaw(const Controller& controller, double deadzone = kDefaultDeadzone, double rel_tol = 1e-10);

    struct Evaluation {
        Vector u;
        double V = 0.0;        ///< canonical norm (0 inside the deadzone)
        double log_V = 0.0;
        bool in_deadzone = true;
    };

    Evaluation evaluate(const Vector& x, std::size_t sigma, std::optional<double> hint = std::nullopt) const;
    Vector operator()(const Vector& x, std::size_t sigma) const { return evaluate(x, sigma).u; }

    const DilationContext& context(std::size_t sigma) const;
    const Controller& controller() const noexcept { return controller_; }
    double deadzone() const noexcept { return deadzone_; }
    double rel_tol() const noexcept { return rel_tol_; }

private:
    const Controller& controller_;
    std::vector<DilationContext> contexts_;
    double deadzone_;
    double rel_tol_;
};

/// Throws PreconditionError for an out-of-range mode.
Vector control_input(const Vector& x, std::size_t sigma, const Controller& controller);

/// Disturbance share of d/dt ||x||_d relative to ||x||_d^(1+mu). Its maximum along a run is the
/// empirical kappa compared against rho.
double disturbance_margin(const Vector& x, double t, const Vector& omega, std::size_t sigma, const Controller& controller,
                          const SwitchedPlant& plant);

/// Same quantity with a prebuilt context and disturbance matrix.
double disturbance_margin(const Vector& x, const Vector& omega, const DilationContext& ctx, const Matrix& E, double mu);

/// Smallest ||x||_d above which every disturbance with ||w|| <= omega_bound keeps the margin below
/// kappa_target: (c_E omega_bound / kappa_target)^(1/(1+mu)), c_E = max over the unit sphere of
/// ||E^T P pi|| / (pi^T P Gd pi) estimated from `samples` points. Requires Gd E = E in every mode.
double matched_kappa_floor(const Controller& controller, const SwitchedPlant& plant, double omega_bound,
                           double kappa_target, std::size_t samples = 20000, std::uint64_t seed = 0);

struct DecayReport {
    bool pass = true;
    double worst_margin = 0.0;  ///< min over intervals of (allowed - observed) decrease rate
    double worst_time = 0.0;
    std::size_t intervals_checked = 0;
    double eta_expected = 0.0;
};

/// Integrated decay test on each same-mode sample interval outside the deadzone:
///   (V_k - V_{k+1}) / h >= eta * avg(V^(1+mu)) - slack * max(1, avg(V^(1+mu))).
/// Throws PreconditionError if any step exceeds 1e-3.
DecayReport decay_rate_check(const Trajectory& traj, const Controller& controller, double eta_expected,
                             double slack = 1e-3);

}  // namespace homctl
