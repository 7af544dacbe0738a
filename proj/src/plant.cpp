#include "homctl/plant.hpp"

#include "homctl/error.hpp"
#include "homctl/io.hpp"

#include <cmath>
#include <string>

namespace homctl {

namespace {
std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }
}  // namespace

SwitchedPlant::SwitchedPlant(std::vector<Mode> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw PreconditionError("plant: at least one mode is required");
    const Mode& first = modes_.front();
    n_ = first.A.rows();
    m_ = first.B.cols();
    if (n_ < 1 || m_ < 1) throw DimensionError("plant: empty A or B in mode 1");
    if (first.E.size() == 0) {
        p_ = m_;
    } else {
        p_ = first.E.cols();
    }
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        Mode& md = modes_[k];
        const std::string tag = "plant mode " + std::to_string(k + 1) + ": ";
        if (md.E.size() == 0) md.E = md.B;
        if (md.A.rows() != n_ || md.A.cols() != n_) {
            throw DimensionError(tag + "A is " + shape(md.A) + ", expected " + std::to_string(n_) + "x" +
                                 std::to_string(n_));
        }
        if (md.B.rows() != n_ || md.B.cols() != m_) {
            throw DimensionError(tag + "B is " + shape(md.B) + ", expected " + std::to_string(n_) + "x" +
                                 std::to_string(m_));
        }
        if (md.E.rows() != n_ || md.E.cols() != p_) {
            throw DimensionError(tag + "E is " + shape(md.E) + ", expected " + std::to_string(n_) + "x" +
                                 std::to_string(p_));
        }
        if (!md.A.allFinite() || !md.B.allFinite() || !md.E.allFinite()) {
            throw PreconditionError(tag + "non-finite entries");
        }
        if (!kalman_controllable(md.A, md.B)) {
            throw ModeError(k, tag + "pair (A, B) is not controllable");
        }
    }
}

const Mode& SwitchedPlant::mode(std::size_t sigma) const {
    if (sigma >= modes_.size()) {
        throw PreconditionError("plant: mode index " + std::to_string(sigma + 1) + " out of range 1.." +
                                std::to_string(modes_.size()));
    }
    return modes_[sigma];
}

double Sinusoid::operator()(double t) const {
    const double arg = frequency * t + phase;
    return amplitude * (waveform == Waveform::kSin ? std::sin(arg) : std::cos(arg));
}

DisturbanceSpec DisturbanceSpec::matched_sinusoid(Sinusoid wave, std::size_t channel) {
    DisturbanceSpec spec;
    spec.kind = DisturbanceKind::kMatchedSinusoid;
    spec.matched = wave;
    spec.matched_channel = channel;
    return spec;
}

DisturbanceSpec DisturbanceSpec::sinusoid_sum(std::vector<std::vector<Sinusoid>> channels) {
    DisturbanceSpec spec;
    spec.kind = DisturbanceKind::kSinusoidSum;
    spec.channels = std::move(channels);
    return spec;
}

void validate_disturbance(const DisturbanceSpec& spec, Eigen::Index p) {
    auto finite = [](const Sinusoid& s) {
        return std::isfinite(s.amplitude) && std::isfinite(s.frequency) && std::isfinite(s.phase);
    };
    switch (spec.kind) {
        case DisturbanceKind::kNone:
            return;
        case DisturbanceKind::kMatchedSinusoid:
            if (static_cast<Eigen::Index>(spec.matched_channel) >= p) {
                throw PreconditionError("disturbance: matched channel " + std::to_string(spec.matched_channel + 1) +
                                        " exceeds disturbance dimension " + std::to_string(p));
            }
            if (!finite(spec.matched)) throw PreconditionError("disturbance: non-finite sinusoid");
            return;
        case DisturbanceKind::kSinusoidSum:
            if (static_cast<Eigen::Index>(spec.channels.size()) != p) {
                throw PreconditionError("disturbance: " + std::to_string(spec.channels.size()) +
                                        " channels given, plant expects " + std::to_string(p));
            }
            for (const auto& ch : spec.channels) {
                for (const auto& s : ch) {
                    if (!finite(s)) throw PreconditionError("disturbance: non-finite sinusoid");
                }
            }
            return;
    }
}

Vector eval_disturbance(const DisturbanceSpec& spec, double t, const Vector& /*x*/, Eigen::Index p) {
    Vector w = Vector::Zero(p);
    switch (spec.kind) {
        case DisturbanceKind::kNone:
            break;
        case DisturbanceKind::kMatchedSinusoid:
            if (static_cast<Eigen::Index>(spec.matched_channel) < p) {
                w[static_cast<Eigen::Index>(spec.matched_channel)] = spec.matched(t);
            }
            break;
        case DisturbanceKind::kSinusoidSum:
            for (Eigen::Index i = 0; i < p && i < static_cast<Eigen::Index>(spec.channels.size()); ++i) {
                for (const auto& s : spec.channels[static_cast<std::size_t>(i)]) w[i] += s(t);
            }
            break;
    }
    return w;
}

double disturbance_bound(const DisturbanceSpec& spec) {
    switch (spec.kind) {
        case DisturbanceKind::kNone: return 0.0;
        case DisturbanceKind::kMatchedSinusoid: return std::abs(spec.matched.amplitude);
        case DisturbanceKind::kSinusoidSum: {
            double sq = 0.0;
            for (const auto& ch : spec.channels) {
                double a = 0.0;
                for (const auto& s : ch) a += std::abs(s.amplitude);
                sq += a * a;
            }
            return std::sqrt(sq);
        }
    }
    return 0.0;
}

SwitchedPlant load_plant(const std::filesystem::path& path) { return plant_from_json(read_json_file(path)); }

void save_plant(const SwitchedPlant& plant, const std::filesystem::path& path) {
    write_json_file(path, plant_to_json(plant));
}

}  // namespace homctl
