#include "co2st/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace co2st {

std::string format_shortest(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

std::string format_sig(double value, int digits)
{
    if (digits < 1)
        digits = 1;
    if (value == 0.0 || !std::isfinite(value)) {
        if (!std::isfinite(value))
            return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
        return "0." + std::string(static_cast<std::size_t>(digits - 1), '0');
    }

    // glibc rounds the exact binary value, resolving exact ties to even.
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
    std::string s(buf);
    auto epos = s.find('e');
    int exponent = std::atoi(s.c_str() + epos + 1);
    std::string mantissa = s.substr(0, epos);

    bool negative = mantissa.front() == '-';
    if (negative)
        mantissa.erase(0, 1);
    std::string sig;
    for (char c : mantissa) {
        if (c != '.')
            sig.push_back(c);
    }

    std::string out;
    if (exponent >= -3 && exponent < 5) {
        if (exponent >= 0) {
            std::size_t int_digits = static_cast<std::size_t>(exponent) + 1;
            while (sig.size() < int_digits)
                sig.push_back('0');
            out = sig.substr(0, int_digits);
            if (sig.size() > int_digits)
                out += "." + sig.substr(int_digits);
        }
        else {
            out = "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + sig;
        }
    }
    else {
        out = sig.substr(0, 1);
        if (sig.size() > 1)
            out += "." + sig.substr(1);
        out += "e" + std::to_string(exponent);
    }
    return negative ? "-" + out : out;
}

} // namespace co2st
