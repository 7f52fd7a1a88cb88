#include "succor/notifier.hpp"

#include "succor/error.hpp"

#include <array>
#include <cstdio>
#include <string_view>

namespace succor {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string coords(const geo::GeoPoint& p) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "(%.6f, %.6f)", p.lat_deg, p.lon_deg);
    return buf.data();
}

std::string full_name(const PatientRecord& p) {
    const auto first = trim(p.first_name);
    const auto last = trim(p.last_name);
    if (first.empty() || last.empty())
        return first + last;
    return first + " " + last;
}

// Cuts at a UTF-8 code point boundary.
std::string clip(std::string body) {
    if (body.size() <= kMaxSmsBody)
        return body;
    std::size_t cut = kMaxSmsBody;
    while (cut > 0 && (static_cast<unsigned char>(body[cut]) & 0xC0) == 0x80)
        --cut;
    body.resize(cut);
    return body;
}

}  // namespace

std::string render_contact_sms(const PatientRecord& patient, const geo::GeoPoint& loc,
                               const std::optional<std::string>& address) {
    std::string body = "EMERGENCY: " + full_name(patient) + " needs help at " + coords(loc) + ".";
    if (address) {
        const auto a = trim(*address);
        if (!a.empty())
            body += " " + a;
    }
    return clip(std::move(body));
}

std::string render_hospital_sms(const PatientRecord& patient, const geo::GeoPoint& loc) {
    auto disease = trim(patient.disease_name);
    if (disease.empty())
        disease = "unknown";
    return clip("INCOMING: " + full_name(patient) + ", disease: " + disease + ", born " +
                patient.birth_date.str() + ", location " + coords(loc) + ".");
}

Notifier::Notifier(std::shared_ptr<SmsTransport> transport, HospitalEndpoint hospital,
                   int max_attempts)
    : transport_(std::move(transport)), hospital_(std::move(hospital)),
      max_attempts_(max_attempts) {
    if (!transport_)
        fail(ErrorCode::Validation, "notifier needs a transport");
    if (hospital_.msisdn.empty())
        fail(ErrorCode::Validation, "hospital msisdn is required");
    if (max_attempts_ < 1)
        fail(ErrorCode::Validation, "max_attempts must be at least 1");
}

std::vector<SmsMessage> Notifier::fan_out(const PatientRecord& patient, const geo::GeoPoint& loc,
                                          const std::optional<std::string>& address) const {
    const auto now = system_now();
    const auto contact_body = render_contact_sms(patient, loc, address);

    std::vector<SmsMessage> messages;
    for (const auto& contact : {patient.emergency_contact1, patient.emergency_contact2}) {
        auto to = trim(contact);
        if (!to.empty())
            messages.push_back({std::move(to), contact_body, now});
    }
    messages.push_back({hospital_.msisdn, render_hospital_sms(patient, loc), now});

    for (auto& msg : messages)
        deliver(msg);
    return messages;
}

void Notifier::deliver(SmsMessage& msg) const {
    while (msg.attempts < max_attempts_) {
        ++msg.attempts;
        bool ok = false;
        try {
            ok = transport_->send(msg);
        } catch (...) {
            ok = false;
        }
        if (ok) {
            msg.delivery_status = DeliveryStatus::Sent;
            return;
        }
    }
    msg.delivery_status = DeliveryStatus::Failed;
}

}  // namespace succor
