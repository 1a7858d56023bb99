#include "uplink/rng.hpp"

#include <cmath>
#include <numbers>

namespace uplink {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kKeyBump0 = 0x9E3779B9u;
constexpr std::uint32_t kKeyBump1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline double to_uniform(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, const DrawKey& key) {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(key.index),
        static_cast<std::uint32_t>(key.index >> 32),
        key.slot,
        static_cast<std::uint32_t>(key.stream),
    };
    std::array<std::uint32_t, 2> k = {
        static_cast<std::uint32_t>(seed),
        static_cast<std::uint32_t>(seed >> 32),
    };
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, k);
        k[0] += kKeyBump0;
        k[1] += kKeyBump1;
    }
    return ctr;
}

std::pair<double, double> uniform_pair(std::uint64_t seed, const DrawKey& key) {
    const auto w = philox4x32(seed, key);
    return {to_uniform(w[0], w[1]), to_uniform(w[2], w[3])};
}

double uniform01(std::uint64_t seed, const DrawKey& key) {
    return uniform_pair(seed, key).first;
}

std::pair<double, double> normal_pair(std::uint64_t seed, const DrawKey& key) {
    const auto [u1, u2] = uniform_pair(seed, key);
    // 1 - u1 lies in (0, 1], keeping the log argument strictly positive.
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

std::complex<double> complex_normal(std::uint64_t seed, const DrawKey& key) {
    const auto [re, im] = normal_pair(seed, key);
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

}  // namespace uplink
