#ifndef PLNLC_CONFIG_HPP
#define PLNLC_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace plnlc {

/// Flat `key = value` configuration with `#` comments. Keys are unique;
/// consumers mark keys as they read them and can reject leftovers, which
/// catches typos.
class KeyValueConfig {
  public:
    static KeyValueConfig parse_file(const std::filesystem::path &path);
    static KeyValueConfig parse_string(const std::string &text, const std::string &origin);

    bool has(const std::string &key) const { return values_.count(key) != 0; }

    std::string require_string(const std::string &key) const;
    std::string get_string(const std::string &key, const std::string &fallback) const;
    long get_long(const std::string &key, long fallback) const;
    double get_double(const std::string &key, double fallback) const;
    bool get_bool(const std::string &key, bool fallback) const;
    std::uint64_t get_u64(const std::string &key, std::uint64_t fallback) const;
    std::optional<double> get_optional_double(const std::string &key) const;

    /// Throws ConfigError listing any key never read by a getter.
    void reject_unread() const;

    const std::vector<std::pair<std::string, std::string>> &entries() const { return order_; }

  private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    std::vector<std::pair<std::string, std::string>> order_;
    mutable std::set<std::string> read_;
};

/// Parse "10-19,85-99" into inclusive label ranges.
std::vector<std::pair<long, long>> parse_label_ranges(const std::string &text);
/// Parse "1996,1998-2001" into an explicit label list.
std::vector<long> parse_label_list(const std::string &text);

} // namespace plnlc

#endif // PLNLC_CONFIG_HPP
