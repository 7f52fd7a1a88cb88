#include "succor/wire.hpp"

#include <charconv>
#include <cmath>

namespace succor::wire {

namespace {

std::string optional_string(const json& j, const char* field, std::string fallback = {}) {
    if (!j.contains(field) || j.at(field).is_null())
        return fallback;
    if (!j.at(field).is_string())
        fail(ErrorCode::Validation, std::string(field) + " must be a string");
    return j.at(field).get<std::string>();
}

json opt_ts(const std::optional<Timestamp>& t) {
    return t ? json(t->str()) : json(nullptr);
}

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::Domain:
    case ErrorCode::EmptyFleet:
        return 400;
    case ErrorCode::WrongTerminal:
        return 403;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownTable:
    case ErrorCode::UnknownPatient:
    case ErrorCode::UnknownEsc:
        return 404;
    case ErrorCode::DuplicateId:
    case ErrorCode::Duplicate:
    case ErrorCode::BadState:
        return 409;
    case ErrorCode::StorageFailure:
    case ErrorCode::BindFailure:
    case ErrorCode::TargetUnreachable:
        return 500;
    }
    return 500;
}

json error_body(const Error& e) {
    return {{"error", to_string(e.code())}, {"message", e.what()}};
}

ErrorCode error_code_from(std::string_view name) {
    for (int c = 0; c <= int(ErrorCode::TargetUnreachable); ++c)
        if (to_string(ErrorCode(c)) == name)
            return ErrorCode(c);
    return ErrorCode::Validation;
}

json to_json(const PatientRecord& p) {
    return {{"id", p.id},
            {"f_name", p.first_name},
            {"l_name", p.last_name},
            {"emergency_contact1", p.emergency_contact1},
            {"emergency_contact2", p.emergency_contact2},
            {"birth_date", p.birth_date.str()},
            {"disease_name", p.disease_name},
            {"reg_date", p.reg_date.str()}};
}

PatientRecord patient_from_json(const json& j) {
    PatientRecord p;
    p.id = optional_string(j, "id");
    p.first_name = optional_string(j, "f_name");
    p.last_name = optional_string(j, "l_name");
    p.emergency_contact1 = optional_string(j, "emergency_contact1");
    p.emergency_contact2 = optional_string(j, "emergency_contact2");
    p.birth_date = Date::parse(required_string(j, "birth_date"));
    p.disease_name = optional_string(j, "disease_name");
    const auto reg = optional_string(j, "reg_date");
    p.reg_date = reg.empty() ? Date::today() : Date::parse(reg);
    return p;
}

PatientUpdate patient_update_from_json(const json& j) {
    if (!j.is_object())
        fail(ErrorCode::Validation, "body must be a JSON object");
    for (const char* fixed : {"id", "reg_date", "birth_date"})
        if (j.contains(fixed))
            fail(ErrorCode::Validation, std::string(fixed) + " cannot be updated");
    PatientUpdate u;
    auto take = [&](const char* field, std::optional<std::string>& out) {
        if (j.contains(field))
            out = optional_string(j, field);
    };
    take("f_name", u.first_name);
    take("l_name", u.last_name);
    take("emergency_contact1", u.emergency_contact1);
    take("emergency_contact2", u.emergency_contact2);
    take("disease_name", u.disease_name);
    return u;
}

json to_json(const EscRecord& e) {
    return {{"id", e.id},
            {"latitude", e.location.lat_text},
            {"longitude", e.location.lon_text},
            {"status", to_string(e.status)}};
}

EscRecord esc_from_json(const json& j, const std::string* id_override) {
    EscRecord e;
    e.id = id_override ? *id_override : required_string(j, "id");
    const auto& lat = j.contains("latitude") ? j.at("latitude") : json();
    const auto& lon = j.contains("longitude") ? j.at("longitude") : json();
    if (lat.is_string() && lon.is_string())
        e.location = Location::from_text(lat.get<std::string>(), lon.get<std::string>());
    else
        e.location = Location::from_point({coordinate(j, "latitude"), coordinate(j, "longitude")});
    return e;
}

json to_json(const SubmitOutcome& o) {
    json j{{"key", o.key.str()},
           {"id", o.key.patient_id},
           {"request_time", o.key.request_time.str()},
           {"received_time", o.received_time.str()},
           {"status", o.queued() ? "queued" : "assigned"}};
    if (o.assignment) {
        j["esc_id"] = o.assignment->esc_id;
        j["distance_km"] = o.assignment->distance.value;
        j["assigned_at"] = o.assignment->assigned_at.str();
    }
    return j;
}

json to_json(const RequestView& v) {
    const bool reserved = v.state == RequestState::Reserved || v.state == RequestState::Acknowledged;
    json j{{"key", v.key.str()},
           {"id", v.key.patient_id},
           {"request_time", v.key.request_time.str()},
           {"received_time", v.received_time.str()},
           {"latitude", v.location.lat_text},
           {"longitude", v.location.lon_text},
           {"state", to_string(v.state)},
           {"color", color_of(v.state)},
           {"received_time2", opt_ts(v.received_time2)},
           {"reply_time", opt_ts(v.reply_time)},
           {"assigned_at", opt_ts(v.assigned_at)}};
    if (v.state == RequestState::Handled) {
        j["esc_id"] = v.terminal_id.value_or("");
    } else {
        j["is_reserved"] = reserved ? "t" : "f";
        j["terminal_id"] = v.terminal_id ? json(*v.terminal_id) : json(nullptr);
    }
    return j;
}

json to_json(const HandledRequest& h) {
    return {{"key", h.key().str()},
            {"id", h.patient_id},
            {"request_time", h.request_time.str()},
            {"received_time", h.received_time.str()},
            {"received_time2", h.received_time2.str()},
            {"latitude", h.location.lat_text},
            {"longitude", h.location.lon_text},
            {"reply_time", h.reply_time.str()},
            {"esc_id", h.esc_id},
            {"state", "HANDLED"},
            {"color", "black"}};
}

json to_json(const AssignmentNotice& n) {
    return {{"key", n.key.str()},
            {"esc_id", n.esc_id},
            {"patient_name", n.patient_name},
            {"disease_name", n.disease_name},
            {"latitude", n.location.lat_text},
            {"longitude", n.location.lon_text},
            {"distance_km", n.distance_km},
            {"assigned_at", n.assigned_at.str()}};
}

AssignmentNotice notice_from_json(const json& j) {
    AssignmentNotice n;
    n.key = RequestKey::parse(j.at("key").get<std::string>());
    n.esc_id = j.at("esc_id").get<std::string>();
    n.patient_name = j.at("patient_name").get<std::string>();
    n.disease_name = j.at("disease_name").get<std::string>();
    n.location = Location::from_text(j.at("latitude").get<std::string>(),
                                     j.at("longitude").get<std::string>());
    n.distance_km = j.at("distance_km").get<double>();
    n.assigned_at = Timestamp::parse(j.at("assigned_at").get<std::string>());
    return n;
}

json to_json(const DispatchEvent& e) {
    json j{{"seq", e.seq},
           {"kind", to_string(e.kind)},
           {"esc_id", e.esc_id},
           {"at", e.at.str()}};
    switch (e.kind) {
    case DispatchEvent::Kind::EscState:
        j["lat"] = e.location.lat_deg;
        j["lon"] = e.location.lon_deg;
        j["reserved"] = e.reserved;
        break;
    case DispatchEvent::Kind::Assign:
        j["lat"] = e.location.lat_deg;
        j["lon"] = e.location.lon_deg;
        j["key"] = e.key->str();
        j["distance_km"] = e.distance_km;
        break;
    case DispatchEvent::Kind::Release:
        j["key"] = e.key->str();
        break;
    }
    return j;
}

DispatchEvent event_from_json(const json& j) {
    DispatchEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "esc")
        e.kind = DispatchEvent::Kind::EscState;
    else if (kind == "assign")
        e.kind = DispatchEvent::Kind::Assign;
    else if (kind == "release")
        e.kind = DispatchEvent::Kind::Release;
    else
        fail(ErrorCode::Validation, "unknown event kind " + kind);
    e.esc_id = j.at("esc_id").get<std::string>();
    e.at = Timestamp::parse(j.at("at").get<std::string>());
    if (j.contains("lat"))
        e.location = {j.at("lat").get<double>(), j.at("lon").get<double>()};
    if (j.contains("reserved"))
        e.reserved = j.at("reserved").get<bool>();
    if (j.contains("key"))
        e.key = RequestKey::parse(j.at("key").get<std::string>());
    if (j.contains("distance_km"))
        e.distance_km = j.at("distance_km").get<double>();
    return e;
}

json to_json(const DispatchStats& s) {
    return {{"submitted", s.submitted}, {"rejected", s.rejected}, {"live", s.live},
            {"queued", s.queued},       {"handled", s.handled},   {"assignments", s.assignments}};
}

DispatchStats stats_from_json(const json& j) {
    DispatchStats s;
    s.submitted = j.at("submitted").get<std::uint64_t>();
    s.rejected = j.at("rejected").get<std::uint64_t>();
    s.live = j.at("live").get<std::uint64_t>();
    s.queued = j.at("queued").get<std::uint64_t>();
    s.handled = j.at("handled").get<std::uint64_t>();
    s.assignments = j.at("assignments").get<std::uint64_t>();
    return s;
}

double coordinate(const json& body, const char* field) {
    if (!body.contains(field))
        fail(ErrorCode::Validation, std::string(field) + " is required");
    const auto& v = body.at(field);
    double out = 0.0;
    if (v.is_number()) {
        out = v.get<double>();
    } else if (v.is_string()) {
        const auto s = v.get<std::string>();
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (s.empty() || ec != std::errc() || p != s.data() + s.size())
            fail(ErrorCode::Validation, std::string(field) + " is not a number: '" + s + "'");
    } else {
        fail(ErrorCode::Validation, std::string(field) + " must be a number");
    }
    if (!std::isfinite(out))
        fail(ErrorCode::Validation, std::string(field) + " must be finite");
    return out;
}

std::string required_string(const json& body, const char* field) {
    if (!body.contains(field) || !body.at(field).is_string())
        fail(ErrorCode::Validation, std::string(field) + " is required");
    return body.at(field).get<std::string>();
}

json parse_body(std::string_view text) {
    auto j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        fail(ErrorCode::Validation, "request body must be a JSON object");
    return j;
}

}  // namespace succor::wire
