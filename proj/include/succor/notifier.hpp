#pragma once

#include "succor/geodesy.hpp"
#include "succor/records.hpp"
#include "succor/sms_transport.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace succor {

struct HospitalEndpoint {
    std::string name;
    std::string msisdn;
};

inline constexpr std::size_t kMaxSmsBody = 480;

/// "EMERGENCY: <first> <last> needs help at (<lat>, <lon>)." followed by
/// " <address>" when one is known. Coordinates carry 6 decimals.
std::string render_contact_sms(const PatientRecord& patient, const geo::GeoPoint& loc,
                               const std::optional<std::string>& address = std::nullopt);

/// "INCOMING: <first> <last>, disease: <disease>, born <YYYY-MM-DD>,
/// location (<lat>, <lon>)." An empty disease renders as "unknown".
std::string render_hospital_sms(const PatientRecord& patient, const geo::GeoPoint& loc);

/// Sends one SMS per non-empty emergency contact plus one to the hospital.
/// Each message gets up to `max_attempts` tries; failures end up as FAILED
/// status and are never thrown.
class Notifier {
public:
    Notifier(std::shared_ptr<SmsTransport> transport, HospitalEndpoint hospital,
             int max_attempts = 3);

    std::vector<SmsMessage> fan_out(const PatientRecord& patient, const geo::GeoPoint& loc,
                                    const std::optional<std::string>& address = std::nullopt) const;

    const HospitalEndpoint& hospital() const { return hospital_; }

private:
    void deliver(SmsMessage& msg) const;

    std::shared_ptr<SmsTransport> transport_;
    HospitalEndpoint hospital_;
    int max_attempts_;
};

}  // namespace succor
