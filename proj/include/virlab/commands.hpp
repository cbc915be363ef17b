#pragma once

#include <cstdint>
#include <string>

namespace virlab {

// Knobs shared by the commands; the CLI flags and the C session keys map
// onto these one to one.
struct RunConfig {
    long level = 6;               // truncation level for graded computations
    long modes = 64;              // Fourier modes for sampled circle maps
    long max_iter = 60;           // cap on welding refinement passes
    double tol = 1e-10;           // residual target for sampled welding
    std::uint64_t seed = 20260815;  // base seed for randomized checks
};

// Executes one operation of the named command against a JSON request and
// returns the JSON reply.  Unknown commands, unknown ops and malformed
// requests throw std::invalid_argument; domain violations and numerical
// failures propagate from the core.
std::string run_command(const std::string& command, const std::string& request,
                        const RunConfig& cfg);

struct ConformanceSummary {
    long passed = 0;
    long flagged = 0;
    long failed = 0;
};

// Runs the identity suite over every module and returns the report as JSON
// text.  The suite parameters are pinned; only the seed of the sampled
// checks is taken from the config.  Recorded deviations come back with
// status "flag", everything else must pass.
std::string conformance_report(const RunConfig& cfg, ConformanceSummary* summary = nullptr);

}  // namespace virlab
