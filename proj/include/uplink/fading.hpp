#pragma once

#include <cstdint>

#include "uplink/model.hpp"
#include "uplink/numerics.hpp"

namespace uplink {

/// Outage convention for the fading evaluator: `common` counts a slot only
/// when the first layers of both users decode; `individual` credits each
/// user's layers separately.
enum class OutageMode { common, individual };

/// Quantization noise variances sigma_{j,l}^2 of base station j's two-stage
/// description under one fading realization.
struct FadingNoises {
    double s1_coarse;   ///< sigma_{1,1}^2
    double s1_refined;  ///< sigma_{1,2}^2
    double s2_coarse;   ///< sigma_{2,1}^2
    double s2_refined;  ///< sigma_{2,2}^2
};

/// Requires cap_low > 0; throws DegenerateCapacityError otherwise.
FadingNoises fading_noises(const SystemParams& p, const ChannelGains& g);

/// Effective received-noise floors (f1, f2): 1 + both stages on a low link,
/// 1 + refined stage only on a high link.
std::pair<double, double> effective_noise(const FadingNoises& n, BackhaulState s);

/// Two-layer rate tuple; r{j}{k} is user j, layer k.
struct FadingRates {
    double r11, r21, r12, r22;
    static FadingRates symmetric(double layer1, double layer2) {
        return {layer1, layer1, layer2, layer2};
    }
};

struct JointThresholds {
    double user1, user2, sum;
};

/// Multiple-access thresholds for decoding layer `layer` of both users
/// jointly. Layer 1 treats both second layers as interference; layer 2 is
/// evaluated after both first layers are known.
JointThresholds joint_layer_thresholds(int layer, double lambda2,
                                       const HermitianM2& a1, const HermitianM2& a2,
                                       double f1, double f2, double power);

bool joint_layer_region(int layer, const FadingRates& r, double lambda2,
                        const HermitianM2& a1, const HermitianM2& a2, double f1,
                        double f2, double power);

struct SingleThresholds {
    double own;    ///< decodable bound for the target user (inclusive)
    double other;  ///< exclusion bound for the other user (strict >)
};

/// First layer of user `user` alone: the other user is entirely undecoded.
SingleThresholds single_layer1_thresholds(int user, double lambda2,
                                          const HermitianM2& a1,
                                          const HermitianM2& a2, double f1,
                                          double f2, double power);

bool single_user_layer1_region(int user, const FadingRates& r, double lambda2,
                               const HermitianM2& a1, const HermitianM2& a2,
                               double f1, double f2, double power);

enum class SecondLayerVariant {
    after_both,  ///< both first layers decoded; other user's layer 2 excluded
    after_own,   ///< only this user's first layer decoded
};

SingleThresholds second_layer_after_both_thresholds(int user, double lambda2,
                                                    const HermitianM2& a1,
                                                    const HermitianM2& a2,
                                                    double f1, double f2,
                                                    double power);

double second_layer_after_own_threshold(int user, double lambda2,
                                        const HermitianM2& a1,
                                        const HermitianM2& a2, double f1,
                                        double f2, double power);

bool second_layer_single_region(int user, SecondLayerVariant variant,
                                const FadingRates& r, double lambda2,
                                const HermitianM2& a1, const HermitianM2& a2,
                                double f1, double f2, double power);

/// Which (user, layer) pairs decoded in one slot. A second layer is decoded
/// only if the same user's first layer is.
struct DecodeOutcome {
    bool u1l1 = false, u2l1 = false, u1l2 = false, u2l2 = false;
    double throughput = 0.0;
};

DecodeOutcome decode_common(const ChannelGains& g, BackhaulState s,
                            const SystemParams& p, double lambda2,
                            const FadingRates& r);

DecodeOutcome decode_individual(const ChannelGains& g, BackhaulState s,
                                const SystemParams& p, double lambda2,
                                const FadingRates& r);

struct McEstimate {
    double estimate;
    double std_error;
    long samples;
};

/// Conditional Monte Carlo: fading is sampled per draw from the counter
/// stream at `seed`; the four backhaul states are enumerated exactly and
/// weighted by their probabilities. The reduction is a fixed pairwise tree
/// over index blocks, so the result is bit-identical for any `jobs`.
McEstimate mc_average_throughput(const SystemParams& p, double lambda2,
                                 const FadingRates& r, OutageMode mode,
                                 long n_samples, std::uint64_t seed, int jobs = 1);

struct FadingOptimum {
    double lambda2;
    FadingRates rates;
    double estimate;
    double std_error;
    long evaluations;
};

/// Derivative-free search over (lambda2, rates) with common random numbers:
/// every candidate is scored on the same fading draws. `layers` is 1 or 2;
/// with symmetric_rates the two users share one rate per layer. The
/// two-layer search space contains the one-layer one (lambda2 = 0, layer-2
/// rate 0), so its optimum never falls below the one-layer optimum.
FadingOptimum optimize_fading(const SystemParams& p, OutageMode mode, int layers,
                              long n_samples, std::uint64_t seed, long budget,
                              bool symmetric_rates = true, int jobs = 1);

}  // namespace uplink
