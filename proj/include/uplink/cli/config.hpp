#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uplink::cli {

/// One `key = value` line inside a `[section]` block.
struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

/// Line-oriented configuration: `[section]` headers, `key = value` entries,
/// `#` comment lines. Duplicate keys within a section are errors, as is any
/// entry before the first section header.
class Config {
  public:
    /// Throws IoError if the file cannot be read, ConfigError on bad syntax.
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);

    const std::vector<ConfigEntry>& entries() const { return entries_; }

    bool has(const std::string& section, const std::string& key) const;

    /// Throws ConfigError naming the section and key when absent.
    const ConfigEntry& get(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    long get_long(const std::string& section, const std::string& key) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;

    /// Comma-separated list, items trimmed, empty items rejected.
    std::vector<std::string> get_list(const std::string& section,
                                      const std::string& key) const;

  private:
    std::vector<ConfigEntry> entries_;
};

/// Parses with full-range checks; throws ConfigError citing the entry's line.
double parse_double(const ConfigEntry& e);
long parse_long(const ConfigEntry& e);
std::uint64_t parse_u64(const ConfigEntry& e);
bool parse_bool(const ConfigEntry& e);

}  // namespace uplink::cli
