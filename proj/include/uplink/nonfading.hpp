#pragma once

#include <array>

#include "uplink/model.hpp"
#include "uplink/numerics.hpp"
#include "uplink/rates.hpp"

namespace uplink {

/// How the remote processor's decompressor treats the two descriptions of a
/// received signal: separate per-stage recovery, or joint recovery of both
/// base stations' coarse descriptions.
enum class DecompressionMode { separate, joint };

/// Quantization noise variances of the two-stage description of one signal:
/// the coarse stage carries sigma1^2 + sigma2^2, the refined stage sigma2^2.
struct CompressionNoises {
    double sigma1_sq;
    double sigma2_sq;
    double sum() const { return sigma1_sq + sigma2_sq; }
};

/// Noise variances when each description stage is recovered on its own.
/// Requires cap_low > 0; throws DegenerateCapacityError otherwise.
CompressionNoises sigma_separate(const SystemParams& p);

/// Noise variances when the two coarse descriptions are recovered jointly,
/// which lowers both variances for alpha > 0. Requires cap_low > 0.
CompressionNoises sigma_joint(const SystemParams& p);

/// Right-hand sides of the six rate-region constraints (see max_weight_rates).
struct LayerBounds {
    double a, b, c, d, e, f;
    std::array<double, 6> as_array() const { return {a, b, c, d, e, f}; }
};

/// Evaluates the six log-det bounds for power split `lambda` (five weights)
/// under the given compression noises.
LayerBounds layer_bounds(const SystemParams& p, const SimplexPoint& lambda,
                         const CompressionNoises& noises);

/// Deliverable rate totals per backhaul state.
struct StateThroughputs {
    double t1;  ///< both links low: first layer only
    double t2;  ///< link 1 high: adds layer 2 and the (1,3)/(2,4) pair
    double t3;  ///< link 2 high: adds layer 2 and the (1,4)/(2,3) pair
    double t4;  ///< both high: everything
};

StateThroughputs state_throughputs(const RateAssignment& rates);

struct ThroughputReport {
    double t1, t2, t3, t4;
    double average;
    SimplexPoint lambda;
    RateAssignment rates;
    DecompressionMode mode;
};

/// Average throughput for a fixed power split: noises -> layer bounds ->
/// weight-optimal rates -> state totals -> expectation over the four states.
ThroughputReport achievable_throughput(const SystemParams& p,
                                       const SimplexPoint& lambda,
                                       DecompressionMode mode);

/// Maximizes achievable_throughput over the masked power simplex.
ThroughputReport optimize_scheme(const SystemParams& p, DecompressionMode mode,
                                 const SchemeMask& mask, long budget);

struct UpperBoundReport {
    double average;
    double t1, t2, t3;           ///< per-state genie bounds
    double sigma1_sq, sigma4_sq; ///< single-description noises, low/high
    double sigma2_sq, sigma3_sq; ///< maximizing mixed-state noises
};

/// Cut-set-style bound: per-state sum capacities with genie-chosen
/// compression noises, averaged over the state distribution.
UpperBoundReport upper_bound_report(const SystemParams& p);
double upper_bound(const SystemParams& p);

}  // namespace uplink
