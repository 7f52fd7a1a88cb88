#pragma once

#include "succor/geodesy.hpp"
#include "succor/timestamp.hpp"

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace succor {

/// A coordinate pair together with its stored decimal text. Tables keep
/// latitude/longitude as text columns, so the text is what round-trips;
/// `point` is always the parse of that text.
struct Location {
    geo::GeoPoint point;
    std::string lat_text;
    std::string lon_text;

    /// Renders both coordinates with 6 fractional digits.
    static Location from_point(geo::GeoPoint p);
    /// Keeps the text verbatim. Throws Error{Validation} for non-decimal text,
    /// more than 6 fractional digits, more than 20 characters, or a point out
    /// of range.
    static Location from_text(std::string_view lat, std::string_view lon);

    friend bool operator==(const Location&, const Location&) = default;
};

struct PatientRecord {
    std::string id;
    std::string first_name;
    std::string last_name;
    std::string emergency_contact1;
    std::string emergency_contact2;  // empty when absent
    Date birth_date;
    std::string disease_name;
    Date reg_date;

    friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

/// Fields a caller may change after registration; id and reg_date are fixed.
struct PatientUpdate {
    std::optional<std::string> first_name;
    std::optional<std::string> last_name;
    std::optional<std::string> emergency_contact1;
    std::optional<std::string> emergency_contact2;
    std::optional<std::string> disease_name;
};

enum class EscStatus { Free, Reserved };

std::string_view to_string(EscStatus s);

struct EscRecord {
    std::string id;
    Location location;
    EscStatus status = EscStatus::Free;

    friend bool operator==(const EscRecord&, const EscRecord&) = default;
};

struct RequestKey {
    std::string patient_id;
    Timestamp request_time;

    /// "<patient_id>@<yyyyMMddHHmmssSSS>"
    std::string str() const;
    static RequestKey parse(std::string_view text);

    friend auto operator<=>(const RequestKey&, const RequestKey&) = default;
    friend bool operator==(const RequestKey&, const RequestKey&) = default;
};

/// A live row of New_Request. `assigned_at` and `ack_time` are lifecycle
/// bookkeeping that the table layout does not carry.
struct HelpRequest {
    std::string patient_id;
    Timestamp request_time;
    Timestamp received_time;
    Location location;
    bool is_reserved = false;
    std::optional<std::string> terminal_id;
    std::optional<Timestamp> assigned_at;
    std::optional<Timestamp> ack_time;

    RequestKey key() const { return {patient_id, request_time}; }

    friend bool operator==(const HelpRequest&, const HelpRequest&) = default;
};

/// A Request_Info row.
struct HandledRequest {
    std::string patient_id;
    Timestamp request_time;
    Timestamp received_time;
    Timestamp received_time2;
    Location location;
    Timestamp reply_time;
    std::string esc_id;

    RequestKey key() const { return {patient_id, request_time}; }

    friend bool operator==(const HandledRequest&, const HandledRequest&) = default;
};

}  // namespace succor
