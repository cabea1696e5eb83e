#include "config.hpp"

#include <fstream>
#include <sstream>

#include "handles.hpp"

namespace cli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw CliError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, table;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw CliError(origin + ":" + std::to_string(lineno) + ": unterminated table header");
            table = trim(line.substr(1, line.size() - 2));
            if (table.empty())
                throw CliError(origin + ":" + std::to_string(lineno) + ": empty table name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CliError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw CliError(origin + ":" + std::to_string(lineno) + ": expected key = value");

        Value v;
        v.line = lineno;
        if (value.front() == '[') {
            if (value.back() != ']')
                throw CliError(origin + ":" + std::to_string(lineno) + ": unterminated array");
            v.is_array = true;
            std::string body = value.substr(1, value.size() - 2);
            std::string item;
            std::istringstream items(body);
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (!item.empty()) v.array.push_back(unquote(item));
            }
        } else {
            v.raw = unquote(value);
        }
        const std::string full = table.empty() ? key : table + "." + key;
        cfg.values_[full] = std::move(v);
    }
    return cfg;
}

bool Config::has_table(const std::string& table) const {
    const std::string prefix = table + ".";
    auto it = values_.lower_bound(prefix);
    return it != values_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

const Config::Value* Config::find(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

void Config::bad(const std::string& key, const std::string& why, int line) const {
    throw CliError(origin_ + ":" + std::to_string(line) + ": key '" + key + "' " + why);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->is_array) bad(key, "is an array, expected a string", v->line);
    return v->raw;
}

double Config::get_double(const std::string& key, double fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->is_array) bad(key, "is an array, expected a number", v->line);
    try {
        size_t used = 0;
        const double out = std::stod(v->raw, &used);
        if (used != v->raw.size()) bad(key, "is not a number: " + v->raw, v->line);
        return out;
    } catch (const std::logic_error&) {
        bad(key, "is not a number: " + v->raw, v->line);
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    const double d = get_double(key, 0.0);
    const int out = static_cast<int>(d);
    if (double(out) != d) bad(key, "is not an integer: " + v->raw, v->line);
    return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->raw == "true") return true;
    if (v->raw == "false") return false;
    bad(key, "is not a boolean: " + v->raw, v->line);
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return {};
    std::vector<double> out;
    if (!v->is_array) bad(key, "expected an array", v->line);
    for (const std::string& item : v->array) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            bad(key, "has a non-numeric element: " + item, v->line);
        }
    }
    return out;
}

} // namespace cli
