#include "plnlc/config.hpp"

#include "plnlc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace plnlc {

namespace {

std::string trim(const std::string &s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return "";
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path.string());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string &text, const std::string &origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (cfg.values_.count(key)) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                              "'");
        }
        cfg.values_[key] = value;
        cfg.order_.emplace_back(key, value);
    }
    return cfg;
}

std::string KeyValueConfig::require_string(const std::string &key) const {
    const auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) {
        throw ConfigError(origin_ + ": missing required key '" + key + "'");
    }
    read_.insert(key);
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string &key, const std::string &fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    read_.insert(key);
    return it->second;
}

long KeyValueConfig::get_long(const std::string &key, long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    read_.insert(key);
    long v = 0;
    const auto &s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(origin_ + ": key '" + key + "' must be an integer, got '" + s + "'");
    }
    return v;
}

double KeyValueConfig::get_double(const std::string &key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    read_.insert(key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) {
            throw std::invalid_argument(it->second);
        }
        return v;
    } catch (const std::exception &) {
        throw ConfigError(origin_ + ": key '" + key + "' must be a real number, got '" +
                          it->second + "'");
    }
}

std::optional<double> KeyValueConfig::get_optional_double(const std::string &key) const {
    if (!has(key)) {
        return std::nullopt;
    }
    return get_double(key, 0.0);
}

bool KeyValueConfig::get_bool(const std::string &key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    read_.insert(key);
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw ConfigError(origin_ + ": key '" + key + "' must be a boolean, got '" + it->second + "'");
}

std::uint64_t KeyValueConfig::get_u64(const std::string &key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    read_.insert(key);
    std::uint64_t v = 0;
    const auto &s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(origin_ + ": key '" + key + "' must be a nonnegative integer, got '" +
                          s + "'");
    }
    return v;
}

void KeyValueConfig::reject_unread() const {
    std::vector<std::string> unknown;
    for (const auto &[key, value] : values_) {
        if (!read_.count(key)) {
            unknown.push_back(key);
        }
    }
    if (!unknown.empty()) {
        std::string msg = origin_ + ": unknown key(s):";
        for (const auto &k : unknown) {
            msg += " '" + k + "'";
        }
        throw ConfigError(msg);
    }
}

std::vector<std::pair<long, long>> parse_label_ranges(const std::string &text) {
    std::vector<std::pair<long, long>> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        const auto dash = item.find('-', 1); // allow a leading minus sign
        try {
            if (dash == std::string::npos) {
                const long v = std::stol(item);
                out.emplace_back(v, v);
            } else {
                const long lo = std::stol(item.substr(0, dash));
                const long hi = std::stol(item.substr(dash + 1));
                if (hi < lo) {
                    throw std::invalid_argument(item);
                }
                out.emplace_back(lo, hi);
            }
        } catch (const std::exception &) {
            throw ConfigError("bad label range '" + item + "' in '" + text + "'");
        }
    }
    return out;
}

std::vector<long> parse_label_list(const std::string &text) {
    std::vector<long> out;
    for (const auto &[lo, hi] : parse_label_ranges(text)) {
        for (long v = lo; v <= hi; ++v) {
            out.push_back(v);
        }
    }
    return out;
}

} // namespace plnlc
