#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tdmlmc {

/// Flat key-value configuration with dotted sections.
///
///     seed = 42
///     [integrand]
///     family = product      # same as integrand.family = product
///     coeffs = 1, 0.5, 0.25
///
/// Lists are comma separated. Accessors throw ConfigError naming the key.
class Config {
public:
    static Config parse(std::istream& in, const std::string& source = "<config>");
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void merge(const Config& other);
    bool has(const std::string& key) const { return values_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
    std::vector<std::size_t> get_sizes(const std::string& key, std::vector<std::size_t> fallback) const;
    std::vector<std::string> get_strings(const std::string& key, std::vector<std::string> fallback) const;

    // Throws ConfigError for the first key outside `allowed`.
    void require_known(const std::set<std::string>& allowed) const;

private:
    std::map<std::string, std::string> values_;
};

// Every key any subcommand understands.
const std::set<std::string>& known_config_keys();

} // namespace tdmlmc
