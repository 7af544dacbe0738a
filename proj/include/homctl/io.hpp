#pragma once

#include "homctl/plant.hpp"
#include "homctl/switching.hpp"
#include "homctl/synthesis.hpp"
#include "homctl/trajectory.hpp"
#include "homctl/verify.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>

namespace homctl {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const char* what);

/// {"n", "m", "p", "modes": [{"A", "B", "E"?}]}; E defaults to B.
SwitchedPlant plant_from_json(const Json& j);
Json plant_to_json(const SwitchedPlant& plant);

Json controller_to_json(const Controller& c);
Controller controller_from_json(const Json& j);
Controller load_controller(const std::filesystem::path& path);
void save_controller(const Controller& c, const std::filesystem::path& path);

/// Mode indices are 1-based in the document.
Json policy_to_json(const SwitchingPolicy& p);
SwitchingPolicy policy_from_json(const Json& j);
SwitchingPolicy load_policy(const std::filesystem::path& path);

Json disturbance_to_json(const DisturbanceSpec& d);
DisturbanceSpec disturbance_from_json(const Json& j);
DisturbanceSpec load_disturbance(const std::filesystem::path& path);

Json report_to_json(const Report& r);

/// CSV with header t,sigma,x1..xn,u1..um,vnorm; sigma is 1-based.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Sidecar with switch instants and the clamp time.
Json trajectory_events_to_json(const Trajectory& traj);

}  // namespace homctl
