#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <utility>

#include "uplink/hermitian.hpp"
#include "uplink/rng.hpp"

namespace uplink {

/// Parameters shared by every evaluator. Power is linear (not dB);
/// capacities are in bits per channel use.
struct SystemParams {
    double power;      ///< per-user transmit power P >= 0
    double alpha;      ///< inter-cell gain coefficient in [0, 1]
    double cap_low;    ///< low-state backhaul capacity C >= 0
    double cap_delta;  ///< high-state capacity increment dC >= 0
    double p_low;      ///< probability that a link is in the low state

    SystemParams(double power, double alpha, double cap_low, double cap_delta,
                 double p_low);
};

/// Joint state of the two backhaul links; first letter is link 1.
enum class BackhaulState { low_low, high_low, low_high, high_high };

inline constexpr std::array<BackhaulState, 4> kBackhaulStates = {
    BackhaulState::low_low, BackhaulState::high_low,
    BackhaulState::low_high, BackhaulState::high_high};

constexpr bool link1_high(BackhaulState s) {
    return s == BackhaulState::high_low || s == BackhaulState::high_high;
}

constexpr bool link2_high(BackhaulState s) {
    return s == BackhaulState::low_high || s == BackhaulState::high_high;
}

inline double link_capacity(bool high, const SystemParams& p) {
    return high ? p.cap_low + p.cap_delta : p.cap_low;
}

/// Links fail independently: p^2, p(1-p), p(1-p), (1-p)^2.
double state_probability(BackhaulState s, double p_low);

struct ChannelGains {
    std::complex<double> a11, a12, a21, a22;
    static ChannelGains unit() { return {1.0, 1.0, 1.0, 1.0}; }
};

/// Four i.i.d. CN(0,1) gains for draw `index` of the stream anchored at `seed`.
ChannelGains sample_gains(std::uint64_t seed, std::uint64_t index);

/// Per-user gain matrices h_j h_j^H for the non-fading (unit gain) channel.
std::pair<HermitianM2, HermitianM2> gain_matrices_nf(double alpha);

/// Per-user gain matrices for one fading realization.
std::pair<HermitianM2, HermitianM2> gain_matrices_fading(const ChannelGains& g,
                                                         double alpha);

}  // namespace uplink
