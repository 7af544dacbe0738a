#pragma once

#include "homctl/trajectory.hpp"

#include <filesystem>
#include <string>

namespace homctl {

/// Three stacked panels (states, inputs, canonical norm) versus time.
std::string render_trajectory_svg(const Trajectory& traj, const std::string& title = "");
void write_trajectory_svg(const std::filesystem::path& path, const Trajectory& traj, const std::string& title = "");

}  // namespace homctl
