#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nhdiode/core.hpp"

namespace nhdiode {

namespace detail {

inline double parse_number(const std::string& text) {
    size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters in '" + text + "'");
    return value;
}

}  // namespace detail

/// Parse an angle given either in radians ("1.0472") or as a fraction of pi
/// ("2pi/3", "-pi/6", "0.5pi", "pi"). A '*' before "pi" is accepted.
inline double parse_angle(const std::string& input) {
    std::string s;
    for (char ch : input)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += static_cast<char>(std::tolower(ch));
    if (s.empty()) throw std::invalid_argument("parse_angle: empty input");

    const size_t pos = s.find("pi");
    if (pos == std::string::npos) return detail::parse_number(s);

    std::string prefix = s.substr(0, pos);
    std::string suffix = s.substr(pos + 2);
    if (!prefix.empty() && prefix.back() == '*') prefix.pop_back();
    double coef = 1.0;
    if (prefix == "-") coef = -1.0;
    else if (!prefix.empty() && prefix != "+") coef = detail::parse_number(prefix);
    double den = 1.0;
    if (!suffix.empty()) {
        if (suffix.front() != '/') throw std::invalid_argument("parse_angle: bad syntax '" + input + "'");
        den = detail::parse_number(suffix.substr(1));
        if (den == 0.0) throw std::invalid_argument("parse_angle: division by zero");
    }
    return coef * kPi / den;
}

/// 17 significant digits, lowercase scientific: round-trip exact for double.
inline std::string format_sci(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", value);
    return buf;
}

/// NH_DIODE_THREADS overrides the configured parallelism degree.
inline int resolve_parallelism(int configured) {
    if (const char* env = std::getenv("NH_DIODE_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return std::max(1, configured);
}

/// Run fn(i) for i in [0, count) across `degree` threads. Work is split in
/// contiguous chunks, so results written to preallocated slots come out
/// identical for any degree.
inline void parallel_for(int count, int degree, const std::function<void(int)>& fn) {
    degree = std::max(1, std::min(degree, count));
    if (degree <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(degree);
    const int chunk = (count + degree - 1) / degree;
    for (int w = 0; w < degree; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& worker : workers) worker.join();
}

}  // namespace nhdiode
