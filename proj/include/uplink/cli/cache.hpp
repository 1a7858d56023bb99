#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace uplink::cli {

/// Cache directory, honoring the UPLINK_CACHE_DIR override; default is
/// $HOME/.cache/uplink. Created on first store.
std::string cache_dir();

/// FNV-1a 64 over the canonical spec text plus the tool version, so results
/// never survive a version bump.
std::uint64_t spec_hash(const std::string& canonical_text);

/// Stored payload for the hash, if present and intact. A corrupt entry is
/// reported on stderr and treated as a miss.
std::optional<std::string> cache_lookup(std::uint64_t hash);

/// Persists the payload; failures are reported on stderr, never fatal.
void cache_store(std::uint64_t hash, const std::string& payload);

}  // namespace uplink::cli
