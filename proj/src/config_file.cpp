#include "langevin/config_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "langevin/errors.hpp"

namespace langevin {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
    std::string_view t = trim(text);
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + ": expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
    std::vector<double> out;
    for (std::string_view item : split(text, ',')) out.push_back(parse_number(item, what));
    return out;
}

Matrix parse_matrix(std::string_view text, std::string_view what) {
    std::vector<std::vector<double>> rows;
    for (std::string_view row : split(text, ';')) {
        if (trim(row).empty()) continue;
        rows.push_back(parse_list(row, what));
    }
    if (rows.empty()) throw ConfigError(std::string(what) + ": empty matrix");
    const std::size_t cols = rows.front().size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw ConfigError(std::string(what) + ": ragged matrix rows");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

ConfigFile ConfigFile::parse(std::string_view text) {
    ConfigFile cfg;
    std::string section;
    int line_no = 0;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            cfg.sections_.insert(section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
        if (section.empty()) throw ConfigError(where + ": entry outside of a section");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError(where + ": empty key");
        Key k{section, key};
        if (cfg.entries_.count(k)) {
            throw ConfigError(where + ": duplicate key '" + section + "." + key + "'");
        }
        cfg.entries_[k] = std::string(trim(line.substr(eq + 1)));
        cfg.lines_[k] = line_no;
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return entries_.count({section, key}) > 0;
}

bool ConfigFile::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

const std::string& ConfigFile::raw(const std::string& section, const std::string& key) const {
    const auto it = entries_.find({section, key});
    if (it == entries_.end()) throw ConfigError("missing key '" + section + "." + key + "'");
    used_.insert(it->first);
    return it->second;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    return raw(section, key);
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    return has(section, key) ? raw(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    return parse_number(raw(section, key), section + "." + key);
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const std::string& text = raw(section, key);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(section + "." + key + ": expected an integer, got '" + text + "'");
    }
    return v;
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& v = raw(section, key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(section + "." + key + ": expected true or false, got '" + v + "'");
}

std::vector<double> ConfigFile::get_list(const std::string& section, const std::string& key) const {
    return parse_list(raw(section, key), section + "." + key);
}

Matrix ConfigFile::get_matrix(const std::string& section, const std::string& key) const {
    return parse_matrix(raw(section, key), section + "." + key);
}

void ConfigFile::reject_unused() const {
    std::string unknown;
    for (const auto& [k, v] : entries_) {
        if (used_.count(k)) continue;
        if (!unknown.empty()) unknown += ", ";
        unknown += k.first + "." + k.second + " (line " + std::to_string(lines_.at(k)) + ")";
    }
    if (!unknown.empty()) throw ConfigError("unknown config entries: " + unknown);
}

}  // namespace langevin
