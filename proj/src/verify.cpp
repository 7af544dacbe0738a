#include "homctl/verify.hpp"

#include "homctl/control.hpp"
#include "homctl/error.hpp"
#include "homctl/homogenize.hpp"
#include "homctl/hnorm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <limits>
#include <sstream>

namespace homctl {

const char* to_string(Suite s) {
    switch (s) {
        case Suite::kHomog: return "homog";
        case Suite::kLmi: return "lmi";
        case Suite::kNorm: return "norm";
        case Suite::kDecay: return "decay";
        case Suite::kDwell: return "dwell";
        case Suite::kRobust: return "robust";
    }
    return "unknown";
}

std::vector<Suite> suites_from_string(const std::string& s) {
    if (s == "all") return {Suite::kHomog, Suite::kLmi, Suite::kNorm, Suite::kDecay, Suite::kDwell, Suite::kRobust};
    for (Suite x : {Suite::kHomog, Suite::kLmi, Suite::kNorm, Suite::kDecay, Suite::kDwell, Suite::kRobust}) {
        if (s == to_string(x)) return {x};
    }
    throw ParseError("unknown verification suite '" + s + "'");
}

bool Report::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

std::string mode_tag(std::size_t k) { return " (mode " + std::to_string(k + 1) + ")"; }

CheckResult upper_check(const char* suite, std::string name, std::string anchor, double value, double bound) {
    CheckResult c;
    c.suite = suite;
    c.name = std::move(name);
    c.anchor = std::move(anchor);
    c.tolerance = bound;
    c.margin = bound - value;
    c.pass = value <= bound;
    std::ostringstream d;
    d << "value " << value << " <= " << bound;
    c.detail = d.str();
    return c;
}

CheckResult lower_check(const char* suite, std::string name, std::string anchor, double value, double bound) {
    CheckResult c;
    c.suite = suite;
    c.name = std::move(name);
    c.anchor = std::move(anchor);
    c.tolerance = bound;
    c.margin = value - bound;
    c.pass = value >= bound;
    std::ostringstream d;
    d << "value " << value << " >= " << bound;
    c.detail = d.str();
    return c;
}

Vector random_state(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
    if (x.norm() == 0.0) x[0] = 1.0;
    return x;
}

std::vector<std::size_t> distinct_contexts(const Controller& c) {
    if (c.kind == ControllerKind::kCommon) return {0};
    std::vector<std::size_t> out(c.mode_count());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = k;
    return out;
}

void homog_suite(const SwitchedPlant& plant, const Controller& c, Report& rep) {
    const Eigen::Index n = plant.n();
    const auto ah = is_anti_hurwitz(c.Gd);
    rep.checks.push_back(lower_check("homog", "Gd anti-Hurwitz", "hnorm: DilationContext monotone dilation",
                                     ah.spectrum.min_real, 0.0));
    rep.checks.back().pass = ah.anti_hurwitz;
    for (std::size_t k = 0; k < plant.mode_count(); ++k) {
        const Mode& md = plant.mode(k);
        const Matrix a0 = md.A + md.B * c.modes[k].K0;
        const auto comm = check_commutator_degree(a0, c.Gd, c.mu);
        rep.checks.push_back(upper_check("homog", "A0 Gd - (Gd + mu I) A0 = 0" + mode_tag(k),
                                         "homogenize: HomogenizationResult degree identity", comm.residual,
                                         1e-8 * std::max(1.0, a0.norm())));
        const double gb = (c.Gd * md.B - md.B).norm();
        rep.checks.push_back(upper_check("homog", "Gd B = B" + mode_tag(k),
                                         "homogenize: HomogenizationResult input dilation identity", gb,
                                         1e-8 * std::max(1.0, md.B.norm())));
        CheckResult d;
        d.suite = "homog";
        d.name = "d(s) B = e^s B" + mode_tag(k);
        d.anchor = "homogenize: verify_dilation_of_input";
        d.pass = verify_dilation_of_input(c.Gd, md.B);
        d.tolerance = 1e-8;
        d.margin = d.pass ? 0.0 : -1.0;
        rep.checks.push_back(d);
        CheckResult nil;
        nil.suite = "homog";
        nil.name = "A0 nilpotent" + mode_tag(k);
        nil.anchor = "homogenize: HomogenizationResult nilpotency";
        nil.pass = c.mu == 0.0 || is_nilpotent(a0);
        const Matrix power = [&] {
            Matrix p = Matrix::Identity(n, n);
            for (Eigen::Index i = 0; i < n; ++i) p = p * a0;
            return p;
        }();
        nil.tolerance = 1e-8 * std::max(1.0, std::pow(a0.norm(), static_cast<double>(n)));
        nil.margin = nil.tolerance - power.norm();
        rep.checks.push_back(nil);
    }
}

void lmi_suite(const SwitchedPlant& plant, const Controller& c, Report& rep) {
    for (std::size_t k = 0; k < plant.mode_count(); ++k) {
        const Mode& md = plant.mode(k);
        const ModeGains& g = c.modes[k];
        const Matrix a0 = md.A + md.B * g.K0;
        const auto cert = certify_lmi(g.X, g.K * g.X, a0, md.B, c.Gd, g.rho);
        const double need = cert.margin * cert.scale;
        rep.checks.push_back(lower_check("lmi", "min_eig(-decay LMI)" + mode_tag(k),
                                         "synthesis: Controller decay LMI", cert.lmi_min_eig, need));
        rep.checks.push_back(lower_check("lmi", "min_eig(Gd X + X Gd^T)" + mode_tag(k),
                                         "synthesis: Controller strictness", cert.dilation_min_eig, need));
        rep.checks.push_back(lower_check("lmi", "min_eig(X)" + mode_tag(k), "synthesis: Controller strictness",
                                         cert.x_min_eig, need));
        rep.checks.back().pass = rep.checks.back().pass && cert.x_min_eig > 0.0;
        const double kt = control_effort_bound(g.X, g.K);
        rep.checks.push_back(upper_check("lmi", "stored k_tilde" + mode_tag(k), "synthesis: Controller effort constant",
                                         std::abs(kt - g.k_tilde), 1e-8 * std::max(1.0, kt)));
    }
}

void norm_suite(const Controller& c, std::mt19937_64& rng, std::size_t samples, Report& rep) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t k : distinct_contexts(c)) {
        const DilationContext ctx = c.context(k);
        const Eigen::Index n = ctx.dim();
        double identity_err = 0.0;
        double homog_err = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            const Vector x = std::exp(6.0 * unif(rng) - 3.0) * random_state(rng, n);
            const double s = 4.0 * unif(rng) - 2.0;
            const NormEvaluation ev = evaluate_norm(x, ctx, 1e-10);
            identity_err = std::max(identity_err, std::abs(ctx.p_norm(ev.projection) - 1.0));
            const double scaled = canonical_norm(ctx.dilate(s, x), ctx, 1e-10);
            const double expect = std::exp(s) * ev.value;
            homog_err = std::max(homog_err, std::abs(scaled - expect) / expect);
        }
        rep.checks.push_back(upper_check("norm", "defining identity" + mode_tag(k),
                                         "hnorm: canonical_norm defining identity", identity_err, 1e-9));
        rep.checks.push_back(upper_check("norm", "degree-1 homogeneity" + mode_tag(k),
                                         "hnorm: canonical_norm degree-1 homogeneity", homog_err, 1e-8));
        double grad_err = 0.0;
        for (std::size_t i = 0; i < std::min<std::size_t>(samples, 20); ++i) {
            const Vector x = std::exp(2.0 * unif(rng) - 1.0) * random_state(rng, n);
            const Eigen::RowVectorXd g = hnorm_gradient(x, ctx);
            Eigen::RowVectorXd fd(n);
            const double step = 1e-6 * x.norm();
            for (Eigen::Index j = 0; j < n; ++j) {
                Vector xp = x;
                Vector xm = x;
                xp[j] += step;
                xm[j] -= step;
                fd[j] = (canonical_norm(xp, ctx, 1e-12) - canonical_norm(xm, ctx, 1e-12)) / (2.0 * step);
            }
            grad_err = std::max(grad_err, (g - fd).norm() / std::max(1e-12, g.norm()));
        }
        rep.checks.push_back(upper_check("norm", "gradient vs finite differences" + mode_tag(k),
                                         "hnorm: hnorm_gradient consistency", grad_err, 1e-5));
    }
}

void decay_suite(const SwitchedPlant& plant, const Controller& c, std::mt19937_64& rng, const SuiteContext& sctx,
                 Report& rep) {
    const FeedbackLaw law(c);
    for (std::size_t k = 0; k < plant.mode_count(); ++k) {
        const DilationContext& ctx = law.context(k);
        const Mode& md = plant.mode(k);
        const double rho = c.modes[k].rho;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < sctx.samples; ++i) {
            Vector x = random_state(rng, plant.n());
            x /= ctx.p_norm(x);
            const Vector f = md.A * x + md.B * law(x, k);
            const double dv = hnorm_gradient(x, ctx).dot(f);
            worst = std::min(worst, -rho - dv);
        }
        rep.checks.push_back(lower_check("decay", "dV/dt <= -rho V^(1+mu) on the unit sphere" + mode_tag(k),
                                         "control: decay_rate_check pointwise form", worst,
                                         -1e-6 * std::max(1.0, rho)));
    }
    if (sctx.trajectory) {
        const auto dr = decay_rate_check(*sctx.trajectory, c, c.rho_min());
        rep.checks.push_back(lower_check("decay", "trajectory decay at rho_min", "control: decay_rate_check",
                                         dr.worst_margin, 0.0));
    }
}

void dwell_suite(const Controller& c, std::mt19937_64& rng, const SuiteContext& sctx, Report& rep) {
    if (c.kind != ControllerKind::kMultiple || !c.gamma || !c.c1 || !c.c2) {
        throw PreconditionError("run_suite: dwell suite needs a multiple-kind controller with gamma, c1 and c2");
    }
    rep.checks.push_back(lower_check("dwell", "gamma >= 1", "synthesis: Controller gamma", *c.gamma, 1.0));
    rep.checks.push_back(lower_check("dwell", "c1 > 0", "synthesis: Controller norm equivalence", *c.c1, 0.0));
    rep.checks.back().pass = *c.c1 > 0.0;
    rep.checks.push_back(upper_check("dwell", "c1 <= c2", "synthesis: Controller norm equivalence", *c.c1, *c.c2));
    const auto ctx = c.contexts();
    const double expo = c.mu == 0.0 ? 1.0 : std::abs(c.mu);
    double worst = 0.0;
    double lo = 1.0;
    double hi = 1.0;
    for (std::size_t i = 0; i < sctx.samples; ++i) {
        for (std::size_t a = 0; a < ctx.size(); ++a) {
            Vector x = random_state(rng, ctx[a].dim());
            x /= ctx[a].p_norm(x);
            for (std::size_t b = 0; b < ctx.size(); ++b) {
                const double v = canonical_norm(x, ctx[b]);
                worst = std::max(worst, std::pow(v, expo));
                if (a == 0) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        }
    }
    rep.checks.push_back(upper_check("dwell", "sampled mode jumps <= gamma", "synthesis: estimate_gamma", worst, *c.gamma));
    rep.checks.push_back(lower_check("dwell", "sampled norm ratios >= c1", "synthesis: estimate_c1_c2", lo, *c.c1));
    rep.checks.push_back(upper_check("dwell", "sampled norm ratios <= c2", "synthesis: estimate_c1_c2", hi, *c.c2));
    if (sctx.trajectory) {
        const auto seq = lyapunov_switch_sequence(*sctx.trajectory, c);
        const double max_ratio = seq.ratios.empty() ? 0.0 : *std::max_element(seq.ratios.begin(), seq.ratios.end());
        rep.checks.push_back(upper_check("dwell", "switch jumps <= gamma", "verify: lyapunov_switch_sequence",
                                         max_ratio, seq.gamma));
    }
}

void robust_suite(const SwitchedPlant& plant, const Controller& c, const SuiteContext& sctx, Report& rep) {
    if (!sctx.disturbance || !sctx.trajectory) {
        throw PreconditionError("run_suite: robust suite needs a disturbance and a trajectory run under it");
    }
    const double kappa = empirical_kappa(*sctx.trajectory, c, plant, *sctx.disturbance, sctx.robust_floor);
    const double rho = c.rho_min();
    CheckResult k = upper_check("robust", "empirical kappa < rho_min", "control: disturbance_margin", kappa, rho);
    k.pass = kappa < rho;
    rep.checks.push_back(k);
    if (kappa < rho) {
        Trajectory window = *sctx.trajectory;
        if (sctx.robust_floor > 0.0) {
            // Drop the tail once the run first falls below the floor.
            std::size_t cut = window.size();
            for (std::size_t i = 0; i < window.size(); ++i) {
                if (window.vnorm[i] < sctx.robust_floor) {
                    cut = i;
                    break;
                }
            }
            window.times.resize(cut);
            window.states.resize(cut);
            window.inputs.resize(cut);
            window.modes.resize(cut);
            window.vnorm.resize(cut);
        }
        const auto dr = decay_rate_check(window, c, rho - kappa);
        rep.checks.push_back(lower_check("robust", "trajectory decay at rho - kappa", "control: decay_rate_check",
                                         dr.worst_margin, 0.0));
    }
}

}  // namespace

Report run_suite(const SwitchedPlant& plant, const Controller& controller, const std::vector<Suite>& suites,
                 std::uint64_t seed, const SuiteContext& ctx) {
    if (controller.mode_count() != plant.mode_count()) {
        throw PreconditionError("run_suite: controller and plant mode counts differ");
    }
    Report rep;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    for (Suite s : suites) {
        switch (s) {
            case Suite::kHomog: homog_suite(plant, controller, rep); break;
            case Suite::kLmi: lmi_suite(plant, controller, rep); break;
            case Suite::kNorm: norm_suite(controller, rng, ctx.samples, rep); break;
            case Suite::kDecay: decay_suite(plant, controller, rng, ctx, rep); break;
            case Suite::kDwell: dwell_suite(controller, rng, ctx, rep); break;
            case Suite::kRobust: robust_suite(plant, controller, ctx, rep); break;
        }
    }
    return rep;
}

SwitchSequenceReport lyapunov_switch_sequence(const Trajectory& traj, const Controller& controller, double floor) {
    if (controller.kind != ControllerKind::kMultiple || !controller.gamma) {
        throw PreconditionError("lyapunov_switch_sequence: requires a multiple-kind controller with gamma");
    }
    SwitchSequenceReport rep;
    rep.gamma = *controller.gamma;
    if (traj.empty()) return rep;
    const auto ctx = controller.contexts();
    const double expo = controller.mu == 0.0 ? 1.0 : std::abs(controller.mu);
    rep.entry_values.push_back(canonical_norm(traj.states.front(), ctx.at(traj.modes.front())));
    for (const auto& ev : traj.switches) {
        const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), ev.time);
        if (it == traj.times.end()) break;
        const Vector& x = traj.states[static_cast<std::size_t>(it - traj.times.begin())];
        const double v_from = canonical_norm(x, ctx.at(ev.from));
        const double v_to = canonical_norm(x, ctx.at(ev.to));
        const double ratio = v_from > 0.0 ? std::pow(v_to / v_from, expo) : 0.0;
        rep.switch_times.push_back(ev.time);
        rep.ratios.push_back(ratio);
        rep.ratios_pass = rep.ratios_pass && ratio <= rep.gamma;
        const double prev = rep.entry_values.back();
        if (prev > floor && !(v_to < prev)) rep.entry_decreasing = false;
        rep.entry_values.push_back(v_to);
    }
    return rep;
}

double empirical_kappa(const Trajectory& traj, const Controller& controller, const SwitchedPlant& plant,
                       const DisturbanceSpec& disturbance, double floor) {
    double kappa = -std::numeric_limits<double>::infinity();
    const auto ctx = controller.contexts();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Vector& x = traj.states[i];
        const std::size_t sigma = traj.modes[i];
        if (traj.vnorm[i] <= 0.0 || traj.vnorm[i] < floor) continue;
        if (ctx.at(sigma).p_norm(x) < kDefaultDeadzone) continue;
        const Vector w = eval_disturbance(disturbance, traj.times[i], x, plant.p());
        kappa = std::max(kappa, disturbance_margin(x, w, ctx[sigma], plant.mode(sigma).E, controller.mu));
    }
    return std::isfinite(kappa) ? std::max(kappa, 0.0) : 0.0;
}

}  // namespace homctl
