#include "siq/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace siq {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

double parse_number(const std::string &text, const std::string &what) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(what + ": empty value");
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(what + ": '" + t + "' is not a finite number");
    }
    return v;
}

KeyValueConfig KeyValueConfig::parse(const std::string &text, const std::string &origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");
        if (value.empty()) throw ConfigError(where + ": missing value for '" + key + "'");
        if (!cfg.values_.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

std::optional<std::string> KeyValueConfig::get(const std::string &key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string &key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    return parse_number(*v, origin_.empty() ? key : origin_ + ": " + key);
}

double KeyValueConfig::get_double(const std::string &key, double fallback) const {
    return get_double(key).value_or(fallback);
}

void KeyValueConfig::require_known(const std::set<std::string> &known) const {
    std::string unknown;
    for (const auto &[k, v] : values_) {
        if (!known.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
    }
    if (!unknown.empty()) throw ConfigError(origin_ + ": unknown key(s): " + unknown);
}

}  // namespace siq
