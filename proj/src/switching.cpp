#include "homctl/switching.hpp"

#include "homctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace homctl {

const char* to_string(SwitchingKind k) {
    switch (k) {
        case SwitchingKind::kFixedSequence: return "fixed-sequence";
        case SwitchingKind::kPeriodic: return "periodic";
        case SwitchingKind::kMinDwell: return "min-dwell";
        case SwitchingKind::kAverageDwell: return "adt";
        case SwitchingKind::kStateDependent: return "state-dependent";
    }
    return "unknown";
}

SwitchingKind switching_kind_from_string(const std::string& s) {
    if (s == "fixed-sequence") return SwitchingKind::kFixedSequence;
    if (s == "periodic") return SwitchingKind::kPeriodic;
    if (s == "min-dwell") return SwitchingKind::kMinDwell;
    if (s == "adt") return SwitchingKind::kAverageDwell;
    if (s == "state-dependent") return SwitchingKind::kStateDependent;
    throw ParseError("unknown switching kind '" + s + "'");
}

SwitchingPolicy SwitchingPolicy::constant(std::size_t mode) { return fixed(mode, {}); }

SwitchingPolicy SwitchingPolicy::fixed(std::size_t initial_mode, std::vector<SwitchPoint> sequence) {
    SwitchingPolicy p;
    p.kind = SwitchingKind::kFixedSequence;
    p.initial_mode = initial_mode;
    p.sequence = std::move(sequence);
    return p;
}

SwitchingPolicy SwitchingPolicy::periodic(double period, std::vector<std::size_t> cycle) {
    SwitchingPolicy p;
    p.kind = SwitchingKind::kPeriodic;
    p.period = period;
    p.cycle = std::move(cycle);
    return p;
}

SwitchingPolicy SwitchingPolicy::min_dwell(double tau, double jitter, std::uint64_t seed, std::vector<std::size_t> cycle) {
    SwitchingPolicy p;
    p.kind = SwitchingKind::kMinDwell;
    p.tau = tau;
    p.jitter = jitter;
    p.seed = seed;
    p.cycle = std::move(cycle);
    return p;
}

SwitchingPolicy SwitchingPolicy::average_dwell(double tau_d, std::size_t n0, double burst_gap,
                                               std::vector<std::size_t> cycle) {
    SwitchingPolicy p;
    p.kind = SwitchingKind::kAverageDwell;
    p.tau_d = tau_d;
    p.n0 = n0;
    p.burst_gap = burst_gap;
    p.cycle = std::move(cycle);
    return p;
}

SwitchingPolicy SwitchingPolicy::state_dependent(double proposal_gap, std::vector<std::size_t> cycle) {
    SwitchingPolicy p;
    p.kind = SwitchingKind::kStateDependent;
    p.tau = proposal_gap;
    p.cycle = std::move(cycle);
    return p;
}

SwitchingPolicy SwitchingPolicy::scaled(double factor) const {
    SwitchingPolicy p = *this;
    p.time_scale *= factor;
    return p;
}

void validate_policy(const SwitchingPolicy& policy, std::size_t mode_count) {
    auto check_mode = [&](std::size_t m) {
        if (m >= mode_count) {
            throw PreconditionError("switching: mode " + std::to_string(m + 1) + " out of range (plant has " +
                                    std::to_string(mode_count) + " modes)");
        }
    };
    if (!(policy.time_scale > 0.0) || !std::isfinite(policy.time_scale)) {
        throw PreconditionError("switching: time_scale must be positive");
    }
    if (policy.kind == SwitchingKind::kFixedSequence) {
        check_mode(policy.initial_mode);
        double last = 0.0;
        for (std::size_t k = 0; k < policy.sequence.size(); ++k) {
            const auto& sp = policy.sequence[k];
            check_mode(sp.mode);
            if (!std::isfinite(sp.time) || sp.time < 0.0 || (k > 0 && !(sp.time > last))) {
                throw PreconditionError("switching: fixed sequence times must be finite, >= 0 and strictly increasing");
            }
            last = sp.time;
        }
        return;
    }
    if (policy.cycle.empty()) throw PreconditionError("switching: empty mode cycle");
    for (std::size_t m : policy.cycle) check_mode(m);
    switch (policy.kind) {
        case SwitchingKind::kPeriodic:
            if (!(policy.period > 0.0)) throw PreconditionError("switching: period must be positive");
            break;
        case SwitchingKind::kMinDwell:
            if (!(policy.tau > 0.0) || !(policy.jitter >= 0.0)) {
                throw PreconditionError("switching: min-dwell needs tau > 0 and jitter >= 0");
            }
            break;
        case SwitchingKind::kAverageDwell:
            if (!(policy.tau_d > 0.0) || (policy.n0 > 0 && !(policy.burst_gap > 0.0))) {
                throw PreconditionError("switching: adt needs tau_d > 0 and a positive burst gap when n0 > 0");
            }
            break;
        case SwitchingKind::kStateDependent:
            if (!(policy.tau > 0.0)) throw PreconditionError("switching: state-dependent needs a positive proposal gap");
            break;
        case SwitchingKind::kFixedSequence: break;
    }
}

namespace {

std::size_t start_mode(const SwitchingPolicy& p) {
    return p.kind == SwitchingKind::kFixedSequence ? p.initial_mode : p.cycle.front();
}

/// Switch points in signal time (before time_scale), in (0, horizon].
std::vector<SwitchPoint> generate(const SwitchingPolicy& p, double horizon) {
    std::vector<SwitchPoint> out;
    if (!(horizon > 0.0)) return out;
    auto cyc = [&](std::size_t k) { return p.cycle[k % p.cycle.size()]; };
    switch (p.kind) {
        case SwitchingKind::kFixedSequence:
            for (const auto& sp : p.sequence) {
                if (sp.time > horizon) break;
                if (sp.time > 0.0) out.push_back(sp);
            }
            break;
        case SwitchingKind::kPeriodic:
            for (std::size_t k = 1;; ++k) {
                const double t = static_cast<double>(k) * p.period;
                if (t > horizon) break;
                out.push_back({t, cyc(k)});
            }
            break;
        case SwitchingKind::kStateDependent:
            for (std::size_t k = 1;; ++k) {
                const double t = static_cast<double>(k) * p.tau;
                if (t > horizon) break;
                out.push_back({t, cyc(k)});
            }
            break;
        case SwitchingKind::kMinDwell: {
            std::mt19937_64 rng(p.seed);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            double t = 0.0;
            for (std::size_t k = 1;; ++k) {
                t += p.tau * (1.0 + p.jitter * unif(rng));
                if (t > horizon) break;
                out.push_back({t, cyc(k)});
            }
            break;
        }
        case SwitchingKind::kAverageDwell: {
            double t = 0.0;
            std::size_t k = 1;
            for (; k <= p.n0; ++k) {
                t = static_cast<double>(k) * p.burst_gap;
                if (t > horizon) return out;
                out.push_back({t, cyc(k)});
            }
            for (;; ++k) {
                t += p.tau_d;
                if (t > horizon) break;
                out.push_back({t, cyc(k)});
            }
            break;
        }
    }
    return out;
}

}  // namespace

std::size_t mode_at(const SwitchingPolicy& policy, double t) {
    if (!(t >= 0.0)) throw PreconditionError("mode_at: t must be >= 0");
    const double u = policy.time_scale * t;
    if (policy.kind == SwitchingKind::kPeriodic) {
        const auto k = static_cast<std::size_t>(std::floor(u / policy.period));
        return policy.cycle[k % policy.cycle.size()];
    }
    std::size_t mode = start_mode(policy);
    for (const auto& sp : generate(policy, u)) mode = sp.mode;
    return mode;
}

std::vector<SwitchPoint> switch_times(const SwitchingPolicy& policy, double horizon) {
    auto pts = generate(policy, policy.time_scale * horizon);
    for (auto& sp : pts) sp.time /= policy.time_scale;
    return pts;
}

std::size_t adt_count(const SwitchingPolicy& policy, double t0, double t) {
    if (!(t >= t0)) throw PreconditionError("adt_count: need t >= t0");
    std::size_t count = 0;
    for (const auto& sp : switch_times(policy, t)) {
        if (sp.time > t0) ++count;
    }
    return count;
}

AdtCheck check_adt(const SwitchingPolicy& policy, std::size_t n0, double tau_d, double horizon) {
    if (!(tau_d > 0.0)) throw PreconditionError("check_adt: tau_d must be positive");
    const auto pts = switch_times(policy, horizon);
    AdtCheck out;
    out.worst_excess = -static_cast<double>(n0);
    // The supremum is attained on windows opening just before switch i and closing at switch j.
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i; j < pts.size(); ++j) {
            const double excess = static_cast<double>(j - i + 1) - static_cast<double>(n0) -
                                  (pts[j].time - pts[i].time) / tau_d;
            out.worst_excess = std::max(out.worst_excess, excess);
        }
    }
    out.pass = out.worst_excess <= 1e-12;
    return out;
}

double sddt_next_switch(const Controller& controller, const Vector& x_at_switch, double t_switch, double proposed_next) {
    return std::max(proposed_next, t_switch + sddt_tau(controller, x_at_switch));
}

DwellSupervisor::DwellSupervisor(const Controller& controller, const SwitchingPolicy& policy)
    : controller_(controller), policy_(policy) {
    if (policy.kind != SwitchingKind::kStateDependent) {
        throw PreconditionError("DwellSupervisor: policy kind must be state-dependent");
    }
    validate_policy(policy, controller.mode_count());
    mode_ = policy.cycle.front();
}

double DwellSupervisor::on_switch(double t, const Vector& x) {
    return sddt_next_switch(controller_, x, t, t + policy_.tau / policy_.time_scale);
}

std::size_t DwellSupervisor::next_mode() const { return policy_.cycle[(cycle_pos_ + 1) % policy_.cycle.size()]; }

void DwellSupervisor::advance() {
    ++cycle_pos_;
    mode_ = policy_.cycle[cycle_pos_ % policy_.cycle.size()];
}

}  // namespace homctl
