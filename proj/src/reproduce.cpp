#include "homctl/reproduce.hpp"

#include "homctl/control.hpp"
#include "homctl/error.hpp"
#include "homctl/homogenize.hpp"
#include "homctl/scenarios.hpp"
#include "homctl/sim.hpp"
#include "homctl/svg.hpp"
#include "homctl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace homctl {

namespace {

constexpr double kStep = 1e-4;
constexpr double kSettleThreshold = 1e-6;

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void write_run(const std::filesystem::path& dir, const std::string& stem, const Trajectory& traj,
               const std::string& title) {
    write_trajectory_csv(dir / (stem + ".csv"), traj);
    write_json_file(dir / (stem + "_events.json"), trajectory_events_to_json(traj));
    write_trajectory_svg(dir / (stem + ".svg"), traj, title);
}

/// First sample time after which every |x_i| stays <= box.
std::optional<double> box_entry_time(const Trajectory& traj, double box) {
    for (std::size_t i = traj.size(); i-- > 0;) {
        if (traj.states[i].cwiseAbs().maxCoeff() > box) {
            if (i + 1 < traj.size()) return traj.times[i + 1];
            return std::nullopt;
        }
    }
    return traj.empty() ? std::nullopt : std::optional<double>(traj.times.front());
}

/// Homogenizes the bundled plant, falling back to the variant plant and degree when needed.
struct Homogenized {
    SwitchedPlant plant;
    HomogenizationResult homog;
    Json notes;
};

Homogenized homogenize_bundled(const SwitchedPlant& bundled, double mu, const SwitchedPlant& variant,
                               double variant_mu) {
    Json notes = Json::object();
    notes["bundled_relative_residual"] = homogenization_least_squares(bundled).relative_residual;
    notes["requested_mu"] = mu;
    try {
        auto h = solve_homogenization(bundled, mu);
        notes["plant"] = "bundled";
        return {bundled, std::move(h), notes};
    } catch (const Error& e) {
        notes["bundled_error"] = e.what();
    }
    try {
        auto h = solve_homogenization(variant, mu);
        notes["plant"] = "variant";
        notes["mu"] = mu;
        return {variant, std::move(h), notes};
    } catch (const Error& e) {
        notes["variant_error_at_requested_mu"] = e.what();
    }
    auto h = solve_homogenization(variant, variant_mu);
    notes["plant"] = "variant";
    notes["mu"] = variant_mu;
    notes["admissible_mu"] = {h.admissible.lower, h.admissible.upper};
    return {variant, std::move(h), notes};
}

void append(Report& into, const Report& from) {
    into.checks.insert(into.checks.end(), from.checks.begin(), from.checks.end());
}

ReproduceResult finite_time(const std::filesystem::path& dir, std::uint64_t seed) {
    Homogenized hz = homogenize_bundled(scenarios::ft_plant(), scenarios::kFtMu, scenarios::ft_plant_variant(),
                                        scenarios::kFtMu);
    const SwitchedPlant& plant = hz.plant;
    SynthesisOptions opts;
    opts.seed = seed;
    const Controller ctrl = synthesize_common(plant, hz.homog, scenarios::kFtRho, opts);
    const SwitchingPolicy policy = scenarios::demo_switching();
    const DisturbanceSpec dist = scenarios::ft_disturbance();
    const Vector x0 = scenarios::ft_x0();
    const double tf = 10.0;

    const Trajectory free = integrate(plant, ctrl, policy, x0, tf, kStep);
    const Trajectory disturbed = integrate(plant, ctrl, policy, x0, tf, kStep, dist);

    SuiteContext free_ctx;
    free_ctx.trajectory = free;
    Report report = run_suite(plant, ctrl, {Suite::kHomog, Suite::kLmi, Suite::kNorm, Suite::kDecay}, seed, free_ctx);
    SuiteContext robust_ctx;
    robust_ctx.disturbance = dist;
    robust_ctx.trajectory = disturbed;
    robust_ctx.robust_floor =
        matched_kappa_floor(ctrl, plant, disturbance_bound(dist), 0.5 * ctrl.rho_min(), opts.samples, seed);
    append(report, run_suite(plant, ctrl, {Suite::kRobust}, seed, robust_ctx));
    report.seed = seed;

    const Controller reference = scenarios::ft_reference_controller();
    const SwitchedPlant bundled = scenarios::ft_plant();
    const Trajectory ref_run = integrate(bundled, reference, policy, x0, tf, kStep, dist);

    const double v0 = free.vnorm.front();
    const double rho = ctrl.rho_min();
    const double mu = ctrl.mu;
    Json summary = {{"scenario", "ft"},
                    {"homogenization", hz.notes},
                    {"mu", mu},
                    {"rho", rho},
                    {"x0", {x0[0], x0[1], x0[2], x0[3]}},
                    {"h", kStep},
                    {"t_final", tf},
                    {"V0", v0},
                    {"settling_bound", std::pow(v0, -mu) / (-mu * rho)},
                    {"settling_time", opt_json(settling_time(free, kSettleThreshold))},
                    {"settling_threshold", kSettleThreshold},
                    {"disturbed_final_vnorm", disturbed.vnorm.back()},
                    {"disturbed_box_entry_1e-2", opt_json(box_entry_time(disturbed, 1e-2))},
                    {"robust_floor", robust_ctx.robust_floor},
                    {"reference_gains_box_entry_1e-2", opt_json(box_entry_time(ref_run, 1e-2))},
                    {"verify_pass", report.pass()}};

    save_plant(plant, dir / "plant.json");
    save_plant(bundled, dir / "plant_bundled.json");
    save_controller(ctrl, dir / "controller.json");
    write_json_file(dir / "switching.json", policy_to_json(policy));
    write_json_file(dir / "disturbance.json", disturbance_to_json(dist));
    write_run(dir, "trajectory", free, "finite-time, disturbance-free");
    write_run(dir, "trajectory_disturbed", disturbed, "finite-time, 0.8 sin(10t)");
    write_run(dir, "trajectory_reference_gains", ref_run, "published gains, 0.8 sin(10t)");
    write_json_file(dir / "report.json", report_to_json(report));
    write_json_file(dir / "summary.json", summary);
    return {"ft", report.pass(), summary};
}

ReproduceResult nearly_fixed_time(const std::filesystem::path& dir, std::uint64_t seed) {
    Homogenized hz = homogenize_bundled(scenarios::nfxt_plant(), scenarios::kNfxtMu, scenarios::nfxt_plant_variant(),
                                        scenarios::kNfxtVariantMu);
    const SwitchedPlant& plant = hz.plant;
    SynthesisOptions opts;
    opts.seed = seed;
    const Controller ctrl = synthesize_common(plant, hz.homog, scenarios::kNfxtRho, opts);
    const SwitchingPolicy policy = scenarios::demo_switching();
    const DisturbanceSpec dist = scenarios::nfxt_disturbance();
    const Vector x0 = scenarios::nfxt_x0();
    const double tf = 10.0;

    const Trajectory free = integrate(plant, ctrl, policy, x0, tf, kStep);
    const Trajectory disturbed = integrate(plant, ctrl, policy, x0, tf, kStep, dist);

    SuiteContext free_ctx;
    free_ctx.trajectory = free;
    Report report = run_suite(plant, ctrl, {Suite::kHomog, Suite::kLmi, Suite::kNorm, Suite::kDecay}, seed, free_ctx);

    const double mu = ctrl.mu;
    const double rho = ctrl.rho_min();
    const double bound = 1.0 / (mu * rho);
    const NearlyFixedTimeReport nfx =
        nearly_fixed_time_check(plant, ctrl, policy, {1.0}, {1e3, 1e6}, bound + 0.5, kStep, x0);
    Json entries = Json::array();
    for (const auto& e : nfx.entries) {
        entries.push_back({{"x0_scale", e.x0_scale}, {"radius", e.radius}, {"reached", opt_json(e.reached)},
                           {"pass", e.pass}});
    }
    Json summary = {{"scenario", "nfxt"},
                    {"homogenization", hz.notes},
                    {"mu", mu},
                    {"rho", rho},
                    {"x0", {x0[0], x0[1], x0[2], x0[3]}},
                    {"h", kStep},
                    {"t_final", tf},
                    {"V0", free.vnorm.front()},
                    {"fixed_time_bound", nfx.bound_time},
                    {"fixed_time_runs", entries},
                    {"fixed_time_pass", nfx.pass},
                    {"time_to_unit_ball", opt_json(settling_time(free, 1.0))},
                    {"disturbed_final_vnorm", disturbed.vnorm.back()},
                    {"verify_pass", report.pass()}};

    save_plant(plant, dir / "plant.json");
    save_plant(scenarios::nfxt_plant(), dir / "plant_bundled.json");
    save_controller(ctrl, dir / "controller.json");
    write_json_file(dir / "switching.json", policy_to_json(policy));
    write_json_file(dir / "disturbance.json", disturbance_to_json(dist));
    write_run(dir, "trajectory", free, "nearly fixed-time, disturbance-free");
    write_run(dir, "trajectory_disturbed", disturbed, "nearly fixed-time, matched and mismatched disturbance");
    write_json_file(dir / "report.json", report_to_json(report));
    write_json_file(dir / "summary.json", summary);
    return {"nfxt", report.pass() && nfx.pass, summary};
}

}  // namespace

ReproduceResult reproduce_scenario(const std::string& scenario, const std::filesystem::path& outdir,
                                   std::uint64_t seed) {
    if (scenario != "ft" && scenario != "nfxt") {
        throw PreconditionError("reproduce: unknown scenario '" + scenario + "' (expected ft or nfxt)");
    }
    std::filesystem::create_directories(outdir);
    return scenario == "ft" ? finite_time(outdir, seed) : nearly_fixed_time(outdir, seed);
}

}  // namespace homctl
