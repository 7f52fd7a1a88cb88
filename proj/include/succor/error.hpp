#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace succor {

enum class ErrorCode {
    Validation,
    Domain,
    EmptyFleet,
    DuplicateId,
    NotFound,
    UnknownTable,
    UnknownPatient,
    UnknownEsc,
    Duplicate,
    WrongTerminal,
    BadState,
    StorageFailure,
    BindFailure,
    TargetUnreachable,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library carries one of the codes above; the
/// wire layer maps them onto HTTP statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace succor
