#pragma once

// Flat configuration files:
//
//   # comment
//   [section]
//   key = value
//
// Lists are comma separated; matrices are rows separated by ';' with entries
// separated by ',' (e.g. "2, 0; 0, 1"). All errors are ConfigError with the
// offending line or key in the message.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "langevin/matkit.hpp"

namespace langevin {

// Locale-independent parse of a full token; throws ConfigError naming `what`.
double parse_number(std::string_view text, std::string_view what);
std::vector<double> parse_list(std::string_view text, std::string_view what);
Matrix parse_matrix(std::string_view text, std::string_view what);

class ConfigFile {
public:
    static ConfigFile parse(std::string_view text);
    static ConfigFile load(const std::filesystem::path& path);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key) const;
    Matrix get_matrix(const std::string& section, const std::string& key) const;

    // Throws ConfigError listing entries never read through a getter.
    void reject_unused() const;

private:
    using Key = std::pair<std::string, std::string>;
    const std::string& raw(const std::string& section, const std::string& key) const;

    std::map<Key, std::string> entries_;
    std::map<Key, int> lines_;
    std::set<std::string> sections_;
    mutable std::set<Key> used_;
};

}  // namespace langevin
