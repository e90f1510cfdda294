#include "cavistim/io/grid.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

namespace cavistim::io {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double number(std::string_view s, const std::string& text)
{
    s = trim(s);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) {
        throw GridError("bad number '" + std::string(s) + "' in grid '" + text + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    for (;;) {
        const auto pos = s.find(sep);
        parts.push_back(s.substr(0, pos));
        if (pos == std::string_view::npos) return parts;
        s.remove_prefix(pos + 1);
    }
}

}  // namespace

std::vector<double> parse_grid(const std::string& text)
{
    std::string_view body = trim(text);
    if (body.empty()) throw GridError("empty grid");

    bool log = false;
    if (body.starts_with("log:")) {
        log = true;
        body.remove_prefix(4);
    }

    if (body.find(':') != std::string_view::npos) {
        const auto parts = split(body, ':');
        if (parts.size() != 3) throw GridError("grid '" + text + "' must be start:stop:count");
        const double start = number(parts[0], text);
        const double stop = number(parts[1], text);
        const double count_d = number(parts[2], text);
        if (count_d < 1 || count_d != std::floor(count_d)) throw GridError("grid '" + text + "': count must be >= 1");
        const auto count = static_cast<std::size_t>(count_d);
        if (count == 1 && start != stop) throw GridError("grid '" + text + "': count 1 needs start == stop");
        if (log && (start <= 0.0 || stop <= 0.0)) throw GridError("grid '" + text + "': log spacing needs positive ends");

        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
            out[i] = log ? start * std::pow(stop / start, f) : start + (stop - start) * f;
        }
        out.back() = stop;
        return out;
    }
    if (log) throw GridError("grid '" + text + "': log: needs start:stop:count");

    std::vector<double> out;
    for (auto part : split(body, ',')) out.push_back(number(part, text));
    return out;
}

}  // namespace cavistim::io
