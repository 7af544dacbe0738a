#include "homctl/error.hpp"
#include "homctl/hnorm.hpp"
#include "homctl/homogenize.hpp"
#include "homctl/io.hpp"
#include "homctl/reproduce.hpp"
#include "homctl/sim.hpp"
#include "homctl/svg.hpp"
#include "homctl/synthesis.hpp"
#include "homctl/verify.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace homctl;

// Exit codes.
constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;
constexpr int kInput = 3;
constexpr int kPrecondition = 4;
constexpr int kInfeasible = 5;
constexpr int kNumerical = 6;
constexpr int kBlowUp = 7;

std::uint64_t seed_from_env() {
    const char* s = std::getenv("HOMCTL_SEED");
    if (!s || !*s) return 0;
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != std::string(s).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw CLI::ValidationError("HOMCTL_SEED", std::string("not an unsigned integer: ") + s);
    }
}

Vector parse_vector(const std::string& text, const char* what) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            vals.push_back(std::stod(item, &pos));
            while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError(what, "expected comma-separated numbers, got '" + text + "'");
        }
    }
    if (vals.empty()) throw CLI::ValidationError(what, "empty vector");
    return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::vector<RhoSpec> parse_rho(const std::string& text) {
    if (text.empty() || text == "auto") return {};
    std::vector<RhoSpec> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "auto") {
            out.emplace_back(AutoRho{});
            continue;
        }
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.emplace_back(v);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--rho", "expected a number, 'auto' or a comma-separated list, got '" + text + "'");
        }
    }
    return out;
}

void print_residuals(const HomogenizationResult& h) {
    std::cout << "homogenization: mu = " << h.mu << ", relative lsq residual = " << h.residuals.relative_lsq
              << ", admissible mu in (" << h.admissible.lower << ", " << h.admissible.upper << ")\n";
    for (std::size_t k = 0; k < h.A0.size(); ++k) {
        std::cout << "  mode " << k + 1 << ": sylvester " << h.residuals.sylvester[k] << ", G0 B "
                  << h.residuals.input_kernel[k] << ", degree " << h.residuals.degree[k] << ", Gd B - B "
                  << h.residuals.input_dilation[k] << '\n';
    }
}

struct SynthArgs {
    std::string plant, kind = "common", rho = "auto", out;
    double mu = 0.0;
};

int cmd_synth(const SynthArgs& a, std::uint64_t seed) {
    const SwitchedPlant plant = load_plant(a.plant);
    const HomogenizationResult h = solve_homogenization(plant, a.mu);
    print_residuals(h);
    SynthesisOptions opts;
    opts.seed = seed;
    const auto rho = parse_rho(a.rho);
    Controller c;
    if (a.kind == "common") {
        if (rho.size() > 1) throw CLI::ValidationError("--rho", "kind common takes a single rho");
        c = synthesize_common(plant, h, rho.empty() ? RhoSpec(AutoRho{}) : rho.front(), opts);
    } else {
        c = synthesize_multiple(plant, h, rho, opts);
    }
    for (std::size_t k = 0; k < c.mode_count(); ++k) {
        const auto& g = c.modes[k];
        std::cout << "mode " << k + 1 << ": rho = " << g.rho << ", k_tilde = " << g.k_tilde
                  << ", lmi min eig = " << g.certificate.lmi_min_eig << " (scale " << g.certificate.scale << ")"
                  << (g.certificate.pass ? "" : " [certificate FAILED]") << '\n';
    }
    if (c.gamma) std::cout << "gamma = " << *c.gamma << ", c1 = " << *c.c1 << ", c2 = " << *c.c2 << '\n';
    save_controller(c, a.out);
    std::cout << "wrote " << a.out << '\n';
    return kOk;
}

struct SimArgs {
    std::string plant, ctrl, switching, x0, disturbance, out, svg;
    double tf = 0.0, h = 1e-4;
    bool scale_step = false;
};

int cmd_simulate(const SimArgs& a) {
    const SwitchedPlant plant = load_plant(a.plant);
    const Controller c = load_controller(a.ctrl);
    const SwitchingPolicy policy = load_policy(a.switching);
    const Vector x0 = parse_vector(a.x0, "--x0");
    const DisturbanceSpec dist = a.disturbance.empty() ? DisturbanceSpec::none() : load_disturbance(a.disturbance);
    SimOptions opts;
    opts.scale_step_with_norm = a.scale_step;
    Trajectory traj;
    int code = kOk;
    try {
        traj = integrate(plant, c, policy, x0, a.tf, a.h, dist, opts);
    } catch (const BlowUpError& e) {
        std::cerr << "error: " << e.what() << " (t = " << e.last_time() << "); partial trajectory written\n";
        traj = e.partial();
        code = kBlowUp;
    }
    write_trajectory_csv(a.out, traj);
    write_json_file(a.out + ".events.json", trajectory_events_to_json(traj));
    if (!a.svg.empty()) write_trajectory_svg(a.svg, traj, a.out);
    if (code == kOk) {
        std::cout << "samples " << traj.size() << ", final vnorm " << traj.vnorm.back();
        if (traj.clamp_time) std::cout << ", clamped at t = " << *traj.clamp_time;
        std::cout << '\n';
    }
    return code;
}

struct VerifyArgs {
    std::string plant, ctrl, suite = "all", traj, disturbance, out;
    std::size_t samples = 1000;
    double robust_floor = 0.0;
};

int cmd_verify(const VerifyArgs& a, std::uint64_t seed) {
    const SwitchedPlant plant = load_plant(a.plant);
    const Controller c = load_controller(a.ctrl);
    std::vector<Suite> suites;
    std::stringstream ss(a.suite);
    std::string item;
    while (std::getline(ss, item, ',')) {
        for (Suite s : suites_from_string(item)) suites.push_back(s);
    }
    SuiteContext ctx;
    ctx.samples = a.samples;
    ctx.robust_floor = a.robust_floor;
    if (!a.traj.empty()) ctx.trajectory = read_trajectory_csv(a.traj);
    if (!a.disturbance.empty()) ctx.disturbance = load_disturbance(a.disturbance);
    const Report rep = run_suite(plant, c, suites, seed, ctx);
    for (const auto& chk : rep.checks) {
        std::cout << (chk.pass ? "PASS " : "FAIL ") << chk.suite << ": " << chk.name << " [" << chk.anchor << "] "
                  << chk.detail << '\n';
    }
    std::cout << (rep.pass() ? "overall PASS" : "overall FAIL") << " (" << rep.checks.size() << " checks, seed "
              << seed << ")\n";
    if (!a.out.empty()) write_json_file(a.out, report_to_json(rep));
    return rep.pass() ? kOk : kVerifyFailed;
}

struct HnormArgs {
    std::string ctrl, x;
    std::size_t mode = 1;
    double tol = 1e-10;
};

int cmd_hnorm(const HnormArgs& a) {
    const Controller c = load_controller(a.ctrl);
    if (a.mode < 1 || a.mode > c.mode_count()) throw CLI::ValidationError("--mode", "out of range");
    const DilationContext ctx = c.context(a.mode - 1);
    const Vector x = parse_vector(a.x, "--x");
    if (x.size() != ctx.dim()) throw DimensionError("hnorm: x has the wrong length");
    const NormEvaluation ev = evaluate_norm(x, ctx, a.tol);
    Json j = {{"norm", ev.value}, {"iterations", ev.iterations}};
    if (ev.value > 0.0) {
        j["log_norm"] = ev.log_value;
        j["projection"] = std::vector<double>(ev.projection.data(), ev.projection.data() + ev.projection.size());
        const Eigen::RowVectorXd g = hnorm_gradient(x, ctx);
        j["gradient"] = std::vector<double>(g.data(), g.data() + g.size());
    }
    std::cout << j.dump(2) << '\n';
    return kOk;
}

int cmd_reproduce(const std::string& scenario, const std::string& outdir, std::uint64_t seed) {
    const ReproduceResult r = reproduce_scenario(scenario, outdir, seed);
    std::cout << r.summary.dump(2) << '\n';
    std::cout << "artifacts in " << outdir << '\n';
    return r.verify_pass ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homogeneous controller synthesis and simulation for switched linear systems"};
    app.require_subcommand(1);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Homogenize a plant and synthesize a controller");
    synth->add_option("--plant", sa.plant, "Plant JSON file")->required()->check(CLI::ExistingFile);
    synth->add_option("--mu", sa.mu, "Homogeneity degree")->required();
    synth->add_option("--kind", sa.kind, "common or multiple")->check(CLI::IsMember({"common", "multiple"}));
    synth->add_option("--rho", sa.rho, "Decay rate, 'auto', or a per-mode comma list");
    synth->add_option("--out", sa.out, "Controller JSON output")->required();

    SimArgs ma;
    auto* sim = app.add_subcommand("simulate", "Simulate the closed loop");
    sim->set_help_flag("--help", "Print this help message and exit");
    sim->add_option("--plant", ma.plant, "Plant JSON file")->required()->check(CLI::ExistingFile);
    sim->add_option("--ctrl", ma.ctrl, "Controller JSON file")->required()->check(CLI::ExistingFile);
    sim->add_option("--switching", ma.switching, "Switching policy JSON file")->required()->check(CLI::ExistingFile);
    sim->add_option("--x0", ma.x0, "Initial state, comma separated")->required();
    sim->add_option("--tf", ma.tf, "Final time")->required()->check(CLI::PositiveNumber);
    sim->add_option("--h", ma.h, "Step size")->check(CLI::PositiveNumber);
    sim->add_option("--disturbance", ma.disturbance, "Disturbance JSON file")->check(CLI::ExistingFile);
    sim->add_option("--out", ma.out, "Trajectory CSV output")->required();
    sim->add_option("--svg", ma.svg, "Optional SVG plot");
    sim->add_flag("--scale-step", ma.scale_step, "Shrink the step for large states when mu > 0");

    VerifyArgs va;
    auto* ver = app.add_subcommand("verify", "Run verification suites");
    ver->add_option("--plant", va.plant, "Plant JSON file")->required()->check(CLI::ExistingFile);
    ver->add_option("--ctrl", va.ctrl, "Controller JSON file")->required()->check(CLI::ExistingFile);
    ver->add_option("--suite", va.suite, "homog, lmi, norm, decay, dwell, robust or all (comma list)");
    ver->add_option("--traj", va.traj, "Trajectory CSV for the decay, dwell and robust suites")
        ->check(CLI::ExistingFile);
    ver->add_option("--disturbance", va.disturbance, "Disturbance JSON for the robust suite")
        ->check(CLI::ExistingFile);
    ver->add_option("--samples", va.samples, "Random samples per property")->check(CLI::PositiveNumber);
    ver->add_option("--robust-floor", va.robust_floor, "Ignore samples with ||x||_d below this in the robust suite");
    ver->add_option("--out", va.out, "Report JSON output");

    HnormArgs ha;
    auto* hn = app.add_subcommand("hnorm", "Evaluate the canonical homogeneous norm");
    hn->add_option("--ctrl", ha.ctrl, "Controller JSON file")->required()->check(CLI::ExistingFile);
    hn->add_option("--x", ha.x, "State, comma separated")->required();
    hn->add_option("--mode", ha.mode, "Mode whose Lyapunov matrix is used (1-based)");
    hn->add_option("--tol", ha.tol, "Relative tolerance");

    std::string scenario, outdir;
    auto* rep = app.add_subcommand("reproduce", "Run a bundled demo scenario end to end");
    rep->add_option("--scenario", scenario, "ft or nfxt")->required()->check(CLI::IsMember({"ft", "nfxt"}));
    rep->add_option("--outdir", outdir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const std::uint64_t seed = seed_from_env();
        if (*synth) return cmd_synth(sa, seed);
        if (*sim) return cmd_simulate(ma);
        if (*ver) return cmd_verify(va, seed);
        if (*hn) return cmd_hnorm(ha);
        if (*rep) return cmd_reproduce(scenario, outdir, seed);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what();
        if (e.mode()) std::cerr << " (mode " << *e.mode() + 1 << ")";
        std::cerr << '\n';
        return kInfeasible;
    } catch (const ModeError& e) {
        std::cerr << "error: mode " << e.mode() + 1 << ": " << e.what() << '\n';
        return kInput;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kPrecondition;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
    return kUsage;
}
