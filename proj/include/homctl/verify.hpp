#pragma once

#include "homctl/plant.hpp"
#include "homctl/synthesis.hpp"
#include "homctl/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace homctl {

enum class Suite { kHomog, kLmi, kNorm, kDecay, kDwell, kRobust };

const char* to_string(Suite s);
/// Accepts homog, lmi, norm, decay, dwell, robust and all (expands to every suite).
std::vector<Suite> suites_from_string(const std::string& s);

struct CheckResult {
    std::string suite;
    std::string name;
    std::string anchor;  ///< module invariant the check re-evaluates
    bool pass = false;
    double margin = 0.0; ///< measured value minus threshold; negative means violation
    double tolerance = 0.0;
    std::string detail;
};

struct Report {
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    bool pass() const;
};

/// Optional inputs some suites need.
///   robust  requires `disturbance` and `trajectory` (a run under that disturbance).
///   decay   also checks `trajectory` when present.
///   dwell   also checks the switch sequence of `trajectory` when present.
struct SuiteContext {
    std::optional<DisturbanceSpec> disturbance;
    std::optional<Trajectory> trajectory;
    std::size_t samples = 1000;
    double robust_floor = 0.0;  ///< robust suite ignores samples with ||x||_d below this
};

/// Throws PreconditionError when a selected suite lacks its prerequisites.
Report run_suite(const SwitchedPlant& plant, const Controller& controller, const std::vector<Suite>& suites,
                 std::uint64_t seed, const SuiteContext& ctx = {});

struct SwitchSequenceReport {
    std::vector<double> switch_times;
    std::vector<double> ratios;        ///< (V_to / V_from)^|mu| at each switch (exponent 1 when mu = 0)
    std::vector<double> entry_values;  ///< V of the entered mode at t = 0 and at every switch
    double gamma = 1.0;
    bool ratios_pass = true;
    bool entry_decreasing = true;      ///< strictly decreasing while above the floor
};

/// Entry values at or below `floor` count as arrived at the origin and end the decrease requirement.
SwitchSequenceReport lyapunov_switch_sequence(const Trajectory& traj, const Controller& controller,
                                              double floor = 0.0);

/// Largest disturbance_margin over samples with ||x||_d >= floor.
double empirical_kappa(const Trajectory& traj, const Controller& controller, const SwitchedPlant& plant,
                       const DisturbanceSpec& disturbance, double floor = 0.0);

}  // namespace homctl
