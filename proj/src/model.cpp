#include "uplink/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "uplink/errors.hpp"

namespace uplink {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

bool finite(std::complex<double> z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace

SystemParams::SystemParams(double power, double alpha, double cap_low,
                           double cap_delta, double p_low)
    : power(power), alpha(alpha), cap_low(cap_low), cap_delta(cap_delta), p_low(p_low) {
    require(std::isfinite(power) && power >= 0.0, "power must be finite and >= 0");
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0,
            "alpha must lie in [0, 1]");
    require(std::isfinite(cap_low) && cap_low >= 0.0, "cap_low must be >= 0");
    require(std::isfinite(cap_delta) && cap_delta >= 0.0, "cap_delta must be >= 0");
    require(std::isfinite(p_low) && p_low >= 0.0 && p_low <= 1.0,
            "p_low must lie in [0, 1]");
}

double state_probability(BackhaulState s, double p_low) {
    const double q = 1.0 - p_low;
    switch (s) {
        case BackhaulState::low_low: return p_low * p_low;
        case BackhaulState::high_low:
        case BackhaulState::low_high: return p_low * q;
        case BackhaulState::high_high: return q * q;
    }
    return 0.0;
}

ChannelGains sample_gains(std::uint64_t seed, std::uint64_t index) {
    return {
        complex_normal(seed, {index, 0, RngStream::gains}),
        complex_normal(seed, {index, 1, RngStream::gains}),
        complex_normal(seed, {index, 2, RngStream::gains}),
        complex_normal(seed, {index, 3, RngStream::gains}),
    };
}

std::pair<HermitianM2, HermitianM2> gain_matrices_nf(double alpha) {
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0,
            "alpha must lie in [0, 1]");
    // User 1 arrives along (1, alpha), user 2 along (alpha, 1).
    return {HermitianM2::outer(1.0, alpha), HermitianM2::outer(alpha, 1.0)};
}

std::pair<HermitianM2, HermitianM2> gain_matrices_fading(const ChannelGains& g,
                                                         double alpha) {
    require(finite(g.a11) && finite(g.a12) && finite(g.a21) && finite(g.a22),
            "channel gains must be finite");
    // User 1 arrives along (a11, alpha*a21), user 2 along (alpha*a12, a22).
    return {HermitianM2::outer(g.a11, alpha * g.a21),
            HermitianM2::outer(alpha * g.a12, g.a22)};
}

}  // namespace uplink
