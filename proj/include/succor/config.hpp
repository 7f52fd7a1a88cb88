#pragma once

#include "succor/notifier.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace succor {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::string store = "memory";  // "memory" or "file:<path>"
    std::optional<std::filesystem::path> fixtures_dir;
    HospitalEndpoint hospital{"Emergency Hospital", "000"};
    std::string sms_transport = "recording";  // see make_transport
    double radius_km = 6371.0;
    int poll_timeout_s = 25;
    int reply_timeout_s = 10;
    int geocode_timeout_ms = 500;
    int http_threads = 128;

    /// Throws Error{Validation} on a bad port, radius or timeout.
    void validate() const;
};

/// Reads `key = value` lines; blank lines and lines starting with '#' are
/// skipped. Unknown keys are an error. Keys: host, port, store, fixtures,
/// hospital_name, hospital_msisdn, sms_transport, radius_km, poll_timeout_s,
/// reply_timeout_s, geocode_timeout_ms, http_threads.
ServiceConfig load_config_file(const std::filesystem::path& path, ServiceConfig base = {});

/// Applies one key/value pair with the same rules as the file format.
void apply_config_value(ServiceConfig& cfg, const std::string& key, const std::string& value);

}  // namespace succor
