#include "uplink/cli/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uplink/errors.hpp"

namespace uplink::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("cannot read config file: " + path);
    return parse_text(buffer.str());
}

Config Config::parse_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("unterminated section header", line_no);
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", line_no);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value' or '[section]'", line_no);
        }
        if (section.empty()) {
            throw ConfigError("entry before any [section] header", line_no);
        }
        ConfigEntry e;
        e.section = section;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = line_no;
        if (e.key.empty()) throw ConfigError("empty key", line_no);
        if (e.value.empty()) throw ConfigError("empty value for key '" + e.key + "'", line_no);
        if (cfg.has(e.section, e.key)) {
            throw ConfigError("duplicate key '" + e.key + "' in [" + e.section + "]",
                              line_no);
        }
        cfg.entries_.push_back(std::move(e));
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    for (const auto& e : entries_) {
        if (e.section == section && e.key == key) return true;
    }
    return false;
}

const ConfigEntry& Config::get(const std::string& section,
                               const std::string& key) const {
    for (const auto& e : entries_) {
        if (e.section == section && e.key == key) return e;
    }
    throw ConfigError("missing key '" + key + "' in [" + section + "]");
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
    return get(section, key).value;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    return parse_double(get(section, key));
}

long Config::get_long(const std::string& section, const std::string& key) const {
    return parse_long(get(section, key));
}

std::uint64_t Config::get_u64(const std::string& section,
                              const std::string& key) const {
    return parse_u64(get(section, key));
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
    return parse_bool(get(section, key));
}

std::vector<std::string> Config::get_list(const std::string& section,
                                          const std::string& key) const {
    const ConfigEntry& e = get(section, key);
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(e.value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw ConfigError("empty item in list '" + e.key + "'", e.line);
        }
        items.push_back(item);
    }
    if (items.empty()) throw ConfigError("empty list '" + e.key + "'", e.line);
    return items;
}

double parse_double(const ConfigEntry& e) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end != e.value.c_str() + e.value.size() || errno == ERANGE) {
        throw ConfigError("invalid number '" + e.value + "' for key '" + e.key + "'",
                          e.line);
    }
    return v;
}

long parse_long(const ConfigEntry& e) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(e.value.c_str(), &end, 10);
    if (end != e.value.c_str() + e.value.size() || errno == ERANGE) {
        throw ConfigError("invalid integer '" + e.value + "' for key '" + e.key + "'",
                          e.line);
    }
    return v;
}

std::uint64_t parse_u64(const ConfigEntry& e) {
    errno = 0;
    char* end = nullptr;
    if (!e.value.empty() && e.value.front() == '-') {
        throw ConfigError("negative value '" + e.value + "' for key '" + e.key + "'",
                          e.line);
    }
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (end != e.value.c_str() + e.value.size() || errno == ERANGE) {
        throw ConfigError("invalid integer '" + e.value + "' for key '" + e.key + "'",
                          e.line);
    }
    return v;
}

bool parse_bool(const ConfigEntry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError("invalid boolean '" + e.value + "' for key '" + e.key + "'",
                      e.line);
}

}  // namespace uplink::cli
