#pragma once

#include "homctl/linalg.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace homctl {

struct SwitchEvent {
    double time = 0.0;
    std::size_t from = 0;
    std::size_t to = 0;
};

/// Sampled closed-loop run. Sample k holds x(t_k), u(t_k), the active mode and the canonical
/// norm of the active Lyapunov function (0 where the state is clamped).
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> inputs;
    std::vector<std::size_t> modes;
    std::vector<double> vnorm;
    std::vector<SwitchEvent> switches;
    std::optional<double> clamp_time;  ///< first instant the state was clamped to the origin
    double h = 0.0;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
};

}  // namespace homctl
