#pragma once

#include "homctl/linalg.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace homctl {

/// A matrix-valued unknown of an LMI system. Symmetric unknowns are parameterized by
/// their upper triangle.
struct MatrixUnknown {
    std::string name;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    bool symmetric = false;
};

using AffineMap = std::function<Matrix(const std::vector<Matrix>&)>;

/// Constraint map(values) >= 0 (strict: > 0, enforced as >= margin * I). Shifted blocks carry the
/// common slack t (map(values) >= t I); unshifted ones are pure barrier terms and must be strictly
/// feasible at the start point.
struct LmiBlock {
    std::string label;
    AffineMap map;
    bool strict = true;
    bool shifted = true;
};

struct SdpOptions {
    double margin = 1e-6;       ///< required slack of every block
    double radius = 1e6;        ///< Euclidean bound on the flattened unknowns
    double early_stop = 10.0;   ///< stop as soon as slack >= early_stop * margin (0 disables)
    double gap_tol = 1e-9;      ///< duality-gap target of the central path
    int max_newton = 2000;
    std::uint64_t seed = 0;     ///< drives the affinity probe only
    std::vector<Matrix> start;  ///< optional start point (defaults to all zeros)
};

enum class SdpStatus { kFeasible, kInfeasible, kSolverFailure };

struct SdpResult {
    SdpStatus status = SdpStatus::kSolverFailure;
    std::vector<Matrix> values;
    double slack = 0.0;                ///< achieved common slack t: every block >= t I
    double slack_upper_bound = 0.0;    ///< t + gap at termination
    std::vector<double> block_min_eig; ///< min_eig_sym of each block at the returned point
    int newton_steps = 0;
    std::string message;
};

/// Maximizes the common slack t of the shifted blocks inside the ball ||z|| <= radius by a primal
/// log-barrier path-following method. Feasible means t >= margin. Infeasible means the barrier
/// duality bound proves t < margin. Anything else is a solver failure.
/// Throws PreconditionError if a map is not affine or returns a non-symmetric matrix.
SdpResult sdp_feasibility(const std::vector<MatrixUnknown>& unknowns, const std::vector<LmiBlock>& blocks,
                          const SdpOptions& opts = {});

const char* to_string(SdpStatus s);

}  // namespace homctl
