#include "succor/records.hpp"

#include "succor/error.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace succor {

namespace {

double parse_decimal(std::string_view text) {
    if (text.empty() || text.size() > 20)
        fail(ErrorCode::Validation, "coordinate text must be 1-20 characters");
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+')
        ++i;
    std::size_t int_digits = 0, frac_digits = 0;
    bool dot = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.' && !dot) {
            dot = true;
        } else if (c >= '0' && c <= '9') {
            (dot ? frac_digits : int_digits)++;
        } else {
            fail(ErrorCode::Validation, "malformed coordinate: " + std::string(text));
        }
    }
    if (int_digits == 0 || (dot && frac_digits == 0))
        fail(ErrorCode::Validation, "malformed coordinate: " + std::string(text));
    if (frac_digits > 6)
        fail(ErrorCode::Validation, "coordinate has more than 6 fractional digits: " + std::string(text));

    const std::string_view body = text[0] == '+' ? text.substr(1) : text;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc() || ptr != body.data() + body.size())
        fail(ErrorCode::Validation, "malformed coordinate: " + std::string(text));
    return value;
}

std::string render6(double v) {
    std::array<char, 48> buf{};
    std::snprintf(buf.data(), buf.size(), "%.6f", v);
    std::string s = buf.data();
    if (s == "-0.000000")
        s = "0.000000";
    return s;
}

}  // namespace

Location Location::from_point(geo::GeoPoint p) {
    if (!p.valid())
        fail(ErrorCode::Validation, "coordinate out of range");
    return from_text(render6(p.lat_deg), render6(p.lon_deg));
}

Location Location::from_text(std::string_view lat, std::string_view lon) {
    Location loc;
    loc.point = {parse_decimal(lat), parse_decimal(lon)};
    if (!loc.point.valid())
        fail(ErrorCode::Validation,
             "coordinate out of range: (" + std::string(lat) + ", " + std::string(lon) + ")");
    loc.lat_text = std::string(lat);
    loc.lon_text = std::string(lon);
    return loc;
}

std::string_view to_string(EscStatus s) {
    return s == EscStatus::Free ? "FREE" : "RESERVED";
}

std::string RequestKey::str() const {
    return patient_id + "@" + request_time.compact();
}

RequestKey RequestKey::parse(std::string_view text) {
    const auto at = text.rfind('@');
    if (at == std::string_view::npos || at == 0)
        fail(ErrorCode::Validation, "request key must be <patient_id>@<yyyyMMddHHmmssSSS>");
    return {std::string(text.substr(0, at)), Timestamp::parse_compact(text.substr(at + 1))};
}

}  // namespace succor
