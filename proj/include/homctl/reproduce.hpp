#pragma once

#include "homctl/io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace homctl {

/// Outcome of one scenario bundle. `summary` is also written to outdir/summary.json.
struct ReproduceResult {
    std::string scenario;
    bool verify_pass = false;
    Json summary;
};

/// Full pipeline for "ft" (finite-time demo) or "nfxt" (nearly fixed-time demo):
/// homogenize, synthesize, simulate, verify, then write every artifact into `outdir`.
/// When the bundled plant admits no common homogenization the homogenizable variant is used and
/// the summary records why.
ReproduceResult reproduce_scenario(const std::string& scenario, const std::filesystem::path& outdir,
                                   std::uint64_t seed = 0);

}  // namespace homctl
