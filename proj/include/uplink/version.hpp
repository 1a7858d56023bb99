#pragma once

namespace uplink {

// Participates in the result-cache key: bump on any change that can alter
// computed numbers, so stale entries can never be served.
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace uplink
