#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <utility>

namespace uplink {

// Counter-based generation: every draw is a pure function of
// (seed, stream, index, slot). Results do not depend on evaluation order
// or on how a sample index range is split across threads.

enum class RngStream : std::uint32_t {
    gains = 1,
    covariance = 2,
    params = 3,
    weights = 4,
};

struct DrawKey {
    std::uint64_t index = 0;  ///< sample number within the stream
    std::uint32_t slot = 0;   ///< position within the sample
    RngStream stream = RngStream::gains;
};

/// One Philox 4x32-10 block; key is the seed, counter is (index, slot, stream).
std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, const DrawKey& key);

/// Two independent uniforms in [0, 1) with 53-bit resolution.
std::pair<double, double> uniform_pair(std::uint64_t seed, const DrawKey& key);

/// First element of uniform_pair.
double uniform01(std::uint64_t seed, const DrawKey& key);

/// Two independent standard normals (Box-Muller on one block).
std::pair<double, double> normal_pair(std::uint64_t seed, const DrawKey& key);

/// Circularly symmetric complex Gaussian with E|z|^2 = 1.
std::complex<double> complex_normal(std::uint64_t seed, const DrawKey& key);

}  // namespace uplink
