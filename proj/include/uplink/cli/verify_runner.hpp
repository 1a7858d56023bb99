#pragma once

#include <cstdint>
#include <string>

namespace uplink::cli {

enum class VerifyLevel { quick, full };

struct VerifyOutcome {
    bool pass;
    std::string report_json;
};

/// Replays the closed-form evaluators against the joint-Gaussian oracle.
/// quick: canonical parameter points, a handful of realizations. full: 100
/// randomized parameter draws for the layer bounds and description rates
/// plus 1000 fading realizations, all four backhaul states each.
VerifyOutcome run_verify(VerifyLevel level, std::uint64_t seed);

}  // namespace uplink::cli
