#include "succor/config.hpp"

#include "succor/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace succor {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

int to_int(const std::string& key, const std::string& value) {
    int out = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || p != value.data() + value.size())
        fail(ErrorCode::Validation, key + " must be an integer, got '" + value + "'");
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    double out = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || p != value.data() + value.size())
        fail(ErrorCode::Validation, key + " must be a number, got '" + value + "'");
    return out;
}

}  // namespace

void ServiceConfig::validate() const {
    if (port < 0 || port > 65535)
        fail(ErrorCode::Validation, "port must be within 0-65535");
    if (!std::isfinite(radius_km) || radius_km <= 0)
        fail(ErrorCode::Validation, "radius_km must be positive");
    if (poll_timeout_s < 0 || reply_timeout_s <= 0 || geocode_timeout_ms < 0)
        fail(ErrorCode::Validation, "timeouts must be non-negative");
    if (http_threads < 1)
        fail(ErrorCode::Validation, "http_threads must be at least 1");
    if (hospital.msisdn.empty())
        fail(ErrorCode::Validation, "hospital_msisdn is required");
}

void apply_config_value(ServiceConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "host") cfg.host = value;
    else if (key == "port") cfg.port = to_int(key, value);
    else if (key == "store") cfg.store = value;
    else if (key == "fixtures") cfg.fixtures_dir = value;
    else if (key == "hospital_name") cfg.hospital.name = value;
    else if (key == "hospital_msisdn") cfg.hospital.msisdn = value;
    else if (key == "sms_transport") cfg.sms_transport = value;
    else if (key == "radius_km") cfg.radius_km = to_double(key, value);
    else if (key == "poll_timeout_s") cfg.poll_timeout_s = to_int(key, value);
    else if (key == "reply_timeout_s") cfg.reply_timeout_s = to_int(key, value);
    else if (key == "geocode_timeout_ms") cfg.geocode_timeout_ms = to_int(key, value);
    else if (key == "http_threads") cfg.http_threads = to_int(key, value);
    else fail(ErrorCode::Validation, "unknown config key: " + key);
}

ServiceConfig load_config_file(const std::filesystem::path& path, ServiceConfig base) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::Validation, "cannot read config file " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::Validation,
                 path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        apply_config_value(base, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return base;
}

}  // namespace succor
