#pragma once

#include "homctl/linalg.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace homctl {

/// One subsystem of the switched plant: dx/dt = A x + B u + E w.
struct Mode {
    Matrix A;
    Matrix B;
    Matrix E;
};

/// Switched linear plant. Modes are indexed from 0 in the C++ API and from 1 in files.
/// Construction validates shapes and controllability of every (A, B) pair.
class SwitchedPlant {
public:
    explicit SwitchedPlant(std::vector<Mode> modes);

    Eigen::Index n() const noexcept { return n_; }
    Eigen::Index m() const noexcept { return m_; }
    Eigen::Index p() const noexcept { return p_; }
    std::size_t mode_count() const noexcept { return modes_.size(); }

    const Mode& mode(std::size_t sigma) const;
    const std::vector<Mode>& modes() const noexcept { return modes_; }

private:
    std::vector<Mode> modes_;
    Eigen::Index n_ = 0;
    Eigen::Index m_ = 0;
    Eigen::Index p_ = 0;
};

enum class Waveform { kSin, kCos };

/// amplitude * wave(frequency * t + phase)
struct Sinusoid {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
    Waveform waveform = Waveform::kSin;

    double operator()(double t) const;
};

enum class DisturbanceKind { kNone, kSinusoidSum, kMatchedSinusoid };

/// Exogenous perturbation w(t, x).
///   kNone            zero vector.
///   kSinusoidSum     channel i is the sum of `channels[i]`.
///   kMatchedSinusoid the single sinusoid `matched` drives channel `matched_channel`
///                    (0-based); every other channel is zero.
struct DisturbanceSpec {
    DisturbanceKind kind = DisturbanceKind::kNone;
    std::vector<std::vector<Sinusoid>> channels;
    Sinusoid matched;
    std::size_t matched_channel = 0;

    static DisturbanceSpec none() { return {}; }
    static DisturbanceSpec matched_sinusoid(Sinusoid wave, std::size_t channel = 0);
    static DisturbanceSpec sinusoid_sum(std::vector<std::vector<Sinusoid>> channels);
};

/// Throws PreconditionError if `spec` does not fit a disturbance input of dimension p.
void validate_disturbance(const DisturbanceSpec& spec, Eigen::Index p);

Vector eval_disturbance(const DisturbanceSpec& spec, double t, const Vector& x, Eigen::Index p);

/// Upper bound on ||w(t, x)||_2 over all t and x.
double disturbance_bound(const DisturbanceSpec& spec);

SwitchedPlant load_plant(const std::filesystem::path& path);
void save_plant(const SwitchedPlant& plant, const std::filesystem::path& path);

}  // namespace homctl
