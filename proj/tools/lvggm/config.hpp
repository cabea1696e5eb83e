#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cli {

/// Minimal TOML-style configuration: [table] headers, key = value lines with
/// strings, numbers, booleans and flat arrays, and # comments. Keys are
/// addressed as "table.key"; top-level keys have no prefix.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    bool has_table(const std::string& table) const;

    std::string get_string(const std::string& key, const std::string& fallback = "") const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;

private:
    struct Value {
        std::string raw;
        std::vector<std::string> array; // non-empty when the value was [...]
        bool is_array = false;
        int line = 0;
    };
    const Value* find(const std::string& key) const;
    [[noreturn]] void bad(const std::string& key, const std::string& why, int line) const;

    std::string origin_;
    std::map<std::string, Value> values_;
};

} // namespace cli
