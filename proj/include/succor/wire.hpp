#pragma once

#include "succor/assignment_channel.hpp"
#include "succor/dispatcher.hpp"
#include "succor/error.hpp"
#include "succor/records.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

// JSON shapes of the HTTP API. Field names are the table column names in
// snake case; timestamps use "YYYY-MM-DD HH:MM:SS.mmm".
namespace succor::wire {

using nlohmann::json;

int http_status(ErrorCode code);
json error_body(const Error& e);
/// Reverse of to_string(ErrorCode); unknown names map to Validation.
ErrorCode error_code_from(std::string_view name);

json to_json(const PatientRecord& p);
/// reg_date defaults to today when absent.
PatientRecord patient_from_json(const json& j);
PatientUpdate patient_update_from_json(const json& j);

json to_json(const EscRecord& e);
/// `id_override` supplies the id for PUT /escs/{id}.
EscRecord esc_from_json(const json& j, const std::string* id_override = nullptr);

json to_json(const SubmitOutcome& o);
json to_json(const RequestView& v);
json to_json(const HandledRequest& h);
json to_json(const AssignmentNotice& n);
AssignmentNotice notice_from_json(const json& j);
json to_json(const DispatchEvent& e);
DispatchEvent event_from_json(const json& j);
json to_json(const DispatchStats& s);
DispatchStats stats_from_json(const json& j);

/// Accepts a JSON number or a decimal string. Throws Error{Validation}.
double coordinate(const json& body, const char* field);
std::string required_string(const json& body, const char* field);
json parse_body(std::string_view text);

}  // namespace succor::wire
