#pragma once

#include <stdexcept>
#include <string>

namespace ice {

// Every failure the library can signal. The C API maps these 1:1 onto
// ice_status codes, so keep the list append-only.
enum class ErrorCode {
    None = 0,
    InvalidArgument,
    OutOfRange,
    SystemPromptMisplaced,
    EmptyTranscript,
    Infeasible,
    EmptyStore,
    UnknownId,
    MalformedRequest,
    PolicyInvalid,
    UpstreamUnreachable,
    ContinuationFailed,
    SessionBusy,
    UnknownSession,
    ParseError,
    EmptySpec,
    BoundUndefined,
    IoError,
    Internal,
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::None: return "ok";
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::OutOfRange: return "out-of-range";
        case ErrorCode::SystemPromptMisplaced: return "system-prompt-misplaced";
        case ErrorCode::EmptyTranscript: return "empty-transcript";
        case ErrorCode::Infeasible: return "infeasible";
        case ErrorCode::EmptyStore: return "empty-store";
        case ErrorCode::UnknownId: return "unknown-id";
        case ErrorCode::MalformedRequest: return "malformed-request";
        case ErrorCode::PolicyInvalid: return "policy-invalid";
        case ErrorCode::UpstreamUnreachable: return "upstream-unreachable";
        case ErrorCode::ContinuationFailed: return "continuation-failed";
        case ErrorCode::SessionBusy: return "session-busy";
        case ErrorCode::UnknownSession: return "unknown-session";
        case ErrorCode::ParseError: return "parse-error";
        case ErrorCode::EmptySpec: return "empty-spec";
        case ErrorCode::BoundUndefined: return "bound-undefined";
        case ErrorCode::IoError: return "io-error";
        case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

// Exception carrying a machine-readable code alongside the message.
class IceError : public std::runtime_error {
public:
    IceError(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw IceError(code, message);
}

}  // namespace ice
