#pragma once

#include "homctl/synthesis.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace homctl {

enum class SwitchingKind { kFixedSequence, kPeriodic, kMinDwell, kAverageDwell, kStateDependent };

const char* to_string(SwitchingKind k);
SwitchingKind switching_kind_from_string(const std::string& s);

struct SwitchPoint {
    double time = 0.0;
    std::size_t mode = 0;
};

/// Switching signal description. Modes are 0-based. Generated kinds walk through `cycle`.
///   kFixedSequence  initial_mode until the first entry of `sequence`, then each entry's mode.
///   kPeriodic       each mode of `cycle` stays active for `period` seconds.
///   kMinDwell       gaps tau * (1 + jitter * U[0,1)) drawn from `seed`.
///   kAverageDwell   n0 switches spaced by `burst_gap`, then one switch every `tau_d`.
///   kStateDependent proposals every `tau` seconds, delayed by the dwell-time supervisor
///                   during simulation; mode_at/switch_times report the proposals.
/// The evaluated signal is sigma(time_scale * t).
struct SwitchingPolicy {
    SwitchingKind kind = SwitchingKind::kFixedSequence;
    std::size_t initial_mode = 0;
    std::vector<SwitchPoint> sequence;
    std::vector<std::size_t> cycle{0, 1};
    double period = 1.0;
    double tau = 0.0;
    double jitter = 0.0;
    double tau_d = 0.0;
    std::size_t n0 = 0;
    double burst_gap = 0.0;
    std::uint64_t seed = 0;
    double time_scale = 1.0;

    static SwitchingPolicy constant(std::size_t mode);
    static SwitchingPolicy fixed(std::size_t initial_mode, std::vector<SwitchPoint> sequence);
    static SwitchingPolicy periodic(double period, std::vector<std::size_t> cycle = {0, 1});
    static SwitchingPolicy min_dwell(double tau, double jitter, std::uint64_t seed, std::vector<std::size_t> cycle = {0, 1});
    static SwitchingPolicy average_dwell(double tau_d, std::size_t n0, double burst_gap,
                                         std::vector<std::size_t> cycle = {0, 1});
    static SwitchingPolicy state_dependent(double proposal_gap, std::vector<std::size_t> cycle = {0, 1});

    SwitchingPolicy scaled(double factor) const;
};

/// Throws PreconditionError on malformed parameters or modes >= mode_count.
void validate_policy(const SwitchingPolicy& policy, std::size_t mode_count);

std::size_t mode_at(const SwitchingPolicy& policy, double t);

/// Switch instants in (0, horizon] with the mode entered at each.
std::vector<SwitchPoint> switch_times(const SwitchingPolicy& policy, double horizon);

/// Number of switches in (t0, t].
std::size_t adt_count(const SwitchingPolicy& policy, double t0, double t);

struct AdtCheck {
    bool pass = true;
    double worst_excess = 0.0;  ///< max over windows of N(t0,t) - N0 - (t - t0)/tau_d
};

/// Checks N(t0, t) <= n0 + (t - t0)/tau_d for every window inside [0, horizon].
AdtCheck check_adt(const SwitchingPolicy& policy, std::size_t n0, double tau_d, double horizon);

/// max(proposed_next, t_switch + sddt_tau(controller, x_at_switch)).
double sddt_next_switch(const Controller& controller, const Vector& x_at_switch, double t_switch, double proposed_next);

/// Per-run state of the state-dependent dwell-time supervisor.
class DwellSupervisor {
public:
    DwellSupervisor(const Controller& controller, const SwitchingPolicy& policy);

    /// Registers a switch (or the start) at time t with state x and returns the next switch time.
    double on_switch(double t, const Vector& x);
    std::size_t current_mode() const noexcept { return mode_; }
    std::size_t next_mode() const;
    void advance();

private:
    const Controller& controller_;
    SwitchingPolicy policy_;
    std::size_t cycle_pos_ = 0;
    std::size_t mode_ = 0;
};

}  // namespace homctl
