#include "tdmlmc/config.hpp"

#include "tdmlmc/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tdmlmc {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
        if (auto t = trim(item); !t.empty())
            out.push_back(t);
    return out;
}

double parse_double(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size())
            return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key, "config key '" + key + "': '" + text + "' is not a number");
}

std::uint64_t parse_uint(const std::string& key, const std::string& text)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(key, "config key '" + key + "': '" + text + "' is not a nonnegative integer");
    return v;
}

} // namespace

Config Config::parse(std::istream& in, const std::string& source)
{
    Config cfg;
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(line, source + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, source + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError(line, source + ":" + std::to_string(lineno) + ": empty key");
        if (!section.empty())
            key = section + "." + key;
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open config file '" + path + "'");
    return parse(in, path);
}

void Config::merge(const Config& other)
{
    for (const auto& [k, v] : other.values_)
        values_[k] = v;
}

std::optional<std::string> Config::get(const std::string& key) const
{
    if (auto it = values_.find(key); it != values_.end())
        return it->second;
    return std::nullopt;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
    return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const
{
    const auto v = get(key);
    return v ? parse_double(key, *v) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const
{
    const auto v = get(key);
    return v ? parse_uint(key, *v) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    const auto v = get(key);
    if (!v)
        return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on")
        return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off")
        return false;
    throw ConfigError(key, "config key '" + key + "': '" + *v + "' is not a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key, std::vector<double> fallback) const
{
    const auto v = get(key);
    if (!v)
        return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(*v))
        out.push_back(parse_double(key, item));
    return out;
}

std::vector<std::size_t> Config::get_sizes(const std::string& key, std::vector<std::size_t> fallback) const
{
    const auto v = get(key);
    if (!v)
        return fallback;
    std::vector<std::size_t> out;
    for (const auto& item : split_list(*v))
        out.push_back(static_cast<std::size_t>(parse_uint(key, item)));
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& key, std::vector<std::string> fallback) const
{
    const auto v = get(key);
    return v ? split_list(*v) : fallback;
}

void Config::require_known(const std::set<std::string>& allowed) const
{
    for (const auto& [k, v] : values_)
        if (!allowed.contains(k))
            throw ConfigError(k, "unknown config key '" + k + "'");
}

const std::set<std::string>& known_config_keys()
{
    static const std::set<std::string> keys = {
        "seed",           "threads",         "out",          "integrand.family", "integrand.d",
        "integrand.coeffs", "integrand.decay_r", "run.methods", "run.reps",         "run.d_grid",
        "run.eps",        "run.mc_n",        "run.fix_v",    "run.v",            "anova.method",
        "anova.pairs",    "chain.preset",    "chain.a",      "chain.b",          "chain.time_varying",
        "chain.gamma",    "chain.d",         "chain.calibrate", "chain.pilot",   "decay.i",
        "decay.n",        "lemma1.samples",
    };
    return keys;
}

} // namespace tdmlmc
