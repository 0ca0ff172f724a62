#pragma once

// Line-oriented `key = value` configuration with `#` comments.

#include "commission/error.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace commission {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view text, std::string_view what)
{
    const std::string s(trim(text));
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw ConfigError("");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + std::string(what) + ": '" + s + "'");
    }
}

inline std::int64_t parse_int(std::string_view text, std::string_view what)
{
    const auto s = trim(text);
    std::int64_t v = 0;
    int base = 10;
    auto body = s;
    if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
        base = 16;
        body.remove_prefix(2);
    }
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v, base);
    if (ec != std::errc{} || ptr != body.data() + body.size() || body.empty()) {
        throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return v;
}

class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::istream& in)
    {
        KeyValueConfig cfg;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string_view view = line;
            if (const auto hash = view.find('#'); hash != std::string_view::npos) {
                view = view.substr(0, hash);
            }
            view = trim(view);
            if (view.empty()) {
                continue;
            }
            const auto eq = view.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError("expected 'key = value'", lineno);
            }
            const std::string key(trim(view.substr(0, eq)));
            const std::string value(trim(view.substr(eq + 1)));
            if (key.empty()) {
                throw ParseError("empty key", lineno);
            }
            if (cfg.values_.contains(key)) {
                throw ParseError("duplicate key '" + key + "'", lineno);
            }
            cfg.values_.emplace(key, Entry{value, lineno});
        }
        return cfg;
    }

    static KeyValueConfig parse_string(std::string_view text)
    {
        std::istringstream in{std::string(text)};
        return parse(in);
    }

    static KeyValueConfig load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file '" + path + "'");
        }
        return parse(in);
    }

    bool has(const std::string& key) const { return values_.contains(key); }

    void set(const std::string& key, std::string value) { values_[key] = Entry{std::move(value), 0}; }

    std::optional<std::string> get(const std::string& key) const
    {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            return std::nullopt;
        }
        used_.insert(key);
        return it->second.value;
    }

    std::string get_or(const std::string& key, std::string fallback) const { return get(key).value_or(std::move(fallback)); }

    double get_double_or(const std::string& key, double fallback) const
    {
        const auto v = get(key);
        return v ? parse_double(*v, key) : fallback;
    }

    std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const
    {
        const auto v = get(key);
        return v ? parse_int(*v, key) : fallback;
    }

    std::size_t line_of(const std::string& key) const
    {
        const auto it = values_.find(key);
        return it == values_.end() ? 0 : it->second.line;
    }

    // Keys never read through get(); callers use this to reject typos.
    std::vector<std::string> unused_keys() const
    {
        std::vector<std::string> out;
        for (const auto& [k, _] : values_) {
            if (!used_.contains(k)) {
                out.push_back(k);
            }
        }
        return out;
    }

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    std::map<std::string, Entry> values_;
    mutable std::set<std::string> used_;
};

} // namespace commission
