#include "uplink/cli/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "uplink/version.hpp"

namespace uplink::cli {

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::filesystem::path entry_path(std::uint64_t hash) {
    return std::filesystem::path(cache_dir()) / (hex16(hash) + ".csv");
}

}  // namespace

std::string cache_dir() {
    if (const char* dir = std::getenv("UPLINK_CACHE_DIR"); dir && *dir) {
        return dir;
    }
    const char* home = std::getenv("HOME");
    return std::string(home && *home ? home : ".") + "/.cache/uplink";
}

std::uint64_t spec_hash(const std::string& canonical_text) {
    return fnv1a(canonical_text + "version=" + kToolVersion + "\n");
}

std::optional<std::string> cache_lookup(std::uint64_t hash) {
    std::ifstream in(entry_path(hash), std::ios::binary);
    if (!in) return std::nullopt;

    std::string header;
    if (!std::getline(in, header)) return std::nullopt;
    std::istringstream fields(header);
    std::string magic, version, stored_hash, payload_sum;
    std::size_t byte_count = 0;
    if (!(fields >> magic >> version >> stored_hash >> payload_sum >> byte_count) ||
        magic != "uplink-cache" || version != "1" || stored_hash != hex16(hash)) {
        std::cerr << "cache: discarding malformed entry " << hex16(hash) << "\n";
        return std::nullopt;
    }

    std::ostringstream buf;
    buf << in.rdbuf();
    std::string payload = buf.str();
    if (payload.size() != byte_count || hex16(fnv1a(payload)) != payload_sum) {
        std::cerr << "cache: discarding corrupt entry " << hex16(hash) << "\n";
        return std::nullopt;
    }
    return payload;
}

void cache_store(std::uint64_t hash, const std::string& payload) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir(), ec);
    if (ec) {
        std::cerr << "cache: cannot create " << cache_dir() << ": " << ec.message()
                  << "\n";
        return;
    }
    const auto path = entry_path(hash);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "cache: cannot write " << tmp << "\n";
            return;
        }
        out << "uplink-cache 1 " << hex16(hash) << " " << hex16(fnv1a(payload))
            << " " << payload.size() << "\n"
            << payload;
        out.flush();
        if (!out) {
            std::cerr << "cache: write to " << tmp << " failed\n";
            return;
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::cerr << "cache: cannot finalize " << path.string() << ": "
                  << ec.message() << "\n";
        std::filesystem::remove(tmp, ec);
    }
}

}  // namespace uplink::cli
