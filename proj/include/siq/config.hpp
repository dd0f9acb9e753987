#pragma once

// Flat "key = value" configuration files.
//
//   # comment
//   E_Z = 14e9        # trailing comments are allowed
//
// Keys are case sensitive, values are plain numbers in SI units unless the key
// documents otherwise. Duplicate keys are an error.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace siq {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class KeyValueConfig {
  public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(const std::string &text, const std::string &origin = "<string>");
    static KeyValueConfig load(const std::string &path);

    bool contains(const std::string &key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string &key) const;
    /// Throws ConfigError if the value is present but not a finite number.
    std::optional<double> get_double(const std::string &key) const;
    double get_double(const std::string &key, double fallback) const;

    void set(const std::string &key, const std::string &value) { values_[key] = value; }
    const std::map<std::string, std::string> &entries() const { return values_; }

    /// Throws ConfigError naming every key not in `known`.
    void require_known(const std::set<std::string> &known) const;

  private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

/// strtod wrapper that rejects trailing garbage and non-finite results.
double parse_number(const std::string &text, const std::string &what);

}  // namespace siq
