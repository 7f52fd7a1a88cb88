#include "succor/error.hpp"

namespace succor {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Validation: return "VALIDATION";
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::EmptyFleet: return "EMPTY_FLEET";
    case ErrorCode::DuplicateId: return "DUPLICATE_ID";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::UnknownTable: return "UNKNOWN_TABLE";
    case ErrorCode::UnknownPatient: return "UNKNOWN_PATIENT";
    case ErrorCode::UnknownEsc: return "UNKNOWN_ESC";
    case ErrorCode::Duplicate: return "DUPLICATE";
    case ErrorCode::WrongTerminal: return "WRONG_TERMINAL";
    case ErrorCode::BadState: return "BAD_STATE";
    case ErrorCode::StorageFailure: return "STORAGE_FAILURE";
    case ErrorCode::BindFailure: return "BIND_FAILURE";
    case ErrorCode::TargetUnreachable: return "TARGET_UNREACHABLE";
    }
    return "UNKNOWN";
}

}  // namespace succor
