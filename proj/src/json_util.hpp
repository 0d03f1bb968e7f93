#pragma once

// Strict readers over nlohmann::ordered_json. Every accessor carries the JSON
// path of the value so schema errors can name the offending field.

#include "co2st/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

namespace co2st::jsonutil {

using json = nlohmann::ordered_json;

inline std::string join_path(const std::string& base, std::string_view key)
{
    if (base.empty())
        return std::string(key);
    return base + "." + std::string(key);
}

inline std::string index_path(const std::string& base, std::size_t i)
{
    return base + "[" + std::to_string(i) + "]";
}

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what)
{
    throw Error(ErrorCode::schema, path, (path.empty() ? std::string("document") : path) + ": " + what);
}

// 1-based line/column of a byte offset, for parse diagnostics.
inline std::string describe_offset(std::string_view text, std::size_t offset)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        }
        else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline json parse_document(std::string_view text)
{
    try {
        return json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e) {
        throw Error(ErrorCode::schema, "",
                    "malformed document at " + describe_offset(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
    }
}

// Integral values within the exact double range are written without a
// fractional part.
inline json number(double v)
{
    if (std::trunc(v) == v && std::fabs(v) <= 9007199254740992.0)
        return static_cast<std::int64_t>(v);
    return v;
}

class ObjectReader {
public:
    ObjectReader(const json& value, std::string path) : value_(value), path_(std::move(path))
    {
        if (!value_.is_object())
            schema_error(path_, "expected an object");
    }

    const std::string& path() const { return path_; }

    bool has(std::string_view key) const { return value_.contains(key); }

    const json& require(std::string_view key)
    {
        seen_.emplace(key);
        auto it = value_.find(key);
        if (it == value_.end())
            throw Error(ErrorCode::schema, join_path(path_, key), "missing required field \"" + join_path(path_, key) + "\"");
        return *it;
    }

    const json* optional(std::string_view key)
    {
        seen_.emplace(key);
        auto it = value_.find(key);
        return it == value_.end() ? nullptr : &*it;
    }

    std::string require_string(std::string_view key) { return as_string(require(key), join_path(path_, key)); }

    double require_number(std::string_view key) { return as_number(require(key), join_path(path_, key)); }

    long long require_integer(std::string_view key) { return as_integer(require(key), join_path(path_, key)); }

    const json& require_array(std::string_view key)
    {
        const json& v = require(key);
        if (!v.is_array())
            schema_error(join_path(path_, key), "expected an array");
        return v;
    }

    ObjectReader require_object(std::string_view key) { return ObjectReader(require(key), join_path(path_, key)); }

    /// Rejects keys that were never asked for.
    void finish() const
    {
        for (auto it = value_.begin(); it != value_.end(); ++it) {
            if (!seen_.contains(it.key()))
                schema_error(join_path(path_, it.key()), "unknown field");
        }
    }

    static std::string as_string(const json& v, const std::string& path)
    {
        if (!v.is_string())
            schema_error(path, "expected a string");
        return v.get<std::string>();
    }

    static double as_number(const json& v, const std::string& path)
    {
        if (!v.is_number())
            schema_error(path, "expected a number");
        double d = v.get<double>();
        if (!std::isfinite(d))
            schema_error(path, "expected a finite number");
        return d;
    }

    static long long as_integer(const json& v, const std::string& path)
    {
        if (!v.is_number_integer())
            schema_error(path, "expected an integer");
        return v.get<long long>();
    }

    static bool as_bool(const json& v, const std::string& path)
    {
        if (!v.is_boolean())
            schema_error(path, "expected a boolean");
        return v.get<bool>();
    }

private:
    const json& value_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

} // namespace co2st::jsonutil
